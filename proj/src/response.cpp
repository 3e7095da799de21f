#include "antonov/response.hpp"

#include <algorithm>
#include <cmath>

namespace antonov {

namespace {

struct CosTable {
    std::size_t m;
    int k_max;
    std::vector<double> v;  // [k-1][j]
    CosTable(std::size_t m_, int k_max_) : m(m_), k_max(k_max_), v(static_cast<std::size_t>(k_max_) * (m_ + 1))
    {
        for (int k = 1; k <= k_max; ++k)
            for (std::size_t j = 0; j <= m; ++j)
                v[static_cast<std::size_t>(k - 1) * (m + 1) + j] =
                    std::cos(M_PI * static_cast<double>((static_cast<std::size_t>(k) * j) % (2 * m)) / m);
    }
    double operator()(int k, std::size_t j) const { return v[static_cast<std::size_t>(k - 1) * (m + 1) + j]; }
};

void node_coefficients(const MapNode& nd, const PotentialDensityBasis& basis, const CosTable& ct, double* out)
{
    const std::size_t J = basis.size(), m = ct.m;
    const auto radii = nd.orbit.theta_grid_radii(m);
    std::vector<double> lam((m + 1) * J);
    for (std::size_t j = 0; j <= m; ++j) basis.potential(radii[j], lam.data() + j * J);
    for (int k = 1; k <= ct.k_max; ++k) {
        double* dst = out + static_cast<std::size_t>(k - 1) * J;
        for (std::size_t i = 0; i < J; ++i) {
            double s = 0.5 * (lam[i] * ct(k, 0) + lam[m * J + i] * ct(k, m));
            for (std::size_t j = 1; j < m; ++j) s += lam[j * J + i] * ct(k, j);
            dst[i] = 2 * s / m;
        }
    }
}

ResponseKernel kernel_shell(const FrequencyMap& fm, const PotentialDensityBasis& basis, const ResponseOptions& opts)
{
    if (opts.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    if (opts.theta_samples < 4) throw std::invalid_argument("too few theta samples");
    ResponseKernel K;
    K.J = basis.size();
    K.nodes = fm.nodes.size();
    K.k_max = opts.k_max;
    K.omega_star = fm.omega_star;
    K.margin = opts.margin;
    K.omega.resize(K.nodes);
    K.mass.resize(K.nodes);
    for (std::size_t n = 0; n < K.nodes; ++n) {
        K.omega[n] = fm.nodes[n].omega;
        K.mass[n] = fm.nodes[n].mass;
    }
    K.coef.assign(K.nodes * static_cast<std::size_t>(K.k_max) * K.J, 0.0);
    return K;
}

void check_lambda(const ResponseKernel& K, double lambda)
{
    if (!(lambda < K.omega_star * K.omega_star * (1 - K.margin))) throw NumericalError("inside essential spectrum");
}

// pi * mass * k^2 omega^2 / (k^2 omega^2 - lambda), [node][k-1]
std::vector<double> node_factors(const ResponseKernel& K, double lambda)
{
    std::vector<double> f(K.nodes * static_cast<std::size_t>(K.k_max));
    for (std::size_t n = 0; n < K.nodes; ++n)
        for (int k = 1; k <= K.k_max; ++k) {
            const double kw2 = double(k) * k * K.omega[n] * K.omega[n];
            f[n * static_cast<std::size_t>(K.k_max) + static_cast<std::size_t>(k - 1)] =
                M_PI * K.mass[n] * kw2 / (kw2 - lambda);
        }
    return f;
}

double entry(const ResponseKernel& K, const std::vector<double>& f, std::size_t i, std::size_t j)
{
    double s = 0;
    const std::size_t km = static_cast<std::size_t>(K.k_max);
    for (std::size_t n = 0; n < K.nodes; ++n)
        for (std::size_t k = 0; k < km; ++k) {
            const double* c = &K.coef[(n * km + k) * K.J];
            s += f[n * km + k] * c[i] * c[j];
        }
    return s;
}

}  // namespace

ResponseKernel prepare_response(const FrequencyMap& fm, const PotentialDensityBasis& basis,
                                const ResponseOptions& opts)
{
    ResponseKernel K = kernel_shell(fm, basis, opts);
    const CosTable ct(opts.theta_samples, opts.k_max);
    const std::size_t stride = static_cast<std::size_t>(K.k_max) * K.J;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(K.nodes); ++n)
        node_coefficients(fm.nodes[static_cast<std::size_t>(n)], basis, ct, K.coef.data() + static_cast<std::size_t>(n) * stride);
    return K;
}

ResponseKernel prepare_response_serial(const FrequencyMap& fm, const PotentialDensityBasis& basis,
                                       const ResponseOptions& opts)
{
    ResponseKernel K = kernel_shell(fm, basis, opts);
    const CosTable ct(opts.theta_samples, opts.k_max);
    const std::size_t stride = static_cast<std::size_t>(K.k_max) * K.J;
    for (std::size_t n = 0; n < K.nodes; ++n) node_coefficients(fm.nodes[n], basis, ct, K.coef.data() + n * stride);
    return K;
}

Eigen::MatrixXd assemble_response(const ResponseKernel& K, double lambda)
{
    check_lambda(K, lambda);
    const auto f = node_factors(K, lambda);
    const auto J = static_cast<std::ptrdiff_t>(K.J);
    Eigen::MatrixXd B(J, J);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < J; ++i)
        for (std::ptrdiff_t j = i; j < J; ++j) {
            const double v = entry(K, f, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            B(i, j) = v;
            B(j, i) = v;
        }
    return B;
}

Eigen::MatrixXd assemble_response_serial(const ResponseKernel& K, double lambda)
{
    check_lambda(K, lambda);
    const auto f = node_factors(K, lambda);
    const auto J = static_cast<Eigen::Index>(K.J);
    Eigen::MatrixXd B(J, J);
    for (Eigen::Index i = 0; i < J; ++i)
        for (Eigen::Index j = i; j < J; ++j) {
            const double v = entry(K, f, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            B(i, j) = v;
            B(j, i) = v;
        }
    return B;
}

std::vector<double> response_trace_by_k(const ResponseKernel& K, double lambda)
{
    check_lambda(K, lambda);
    const auto f = node_factors(K, lambda);
    const std::size_t km = static_cast<std::size_t>(K.k_max);
    std::vector<double> tr(km, 0.0);
    for (std::size_t n = 0; n < K.nodes; ++n)
        for (std::size_t k = 0; k < km; ++k) {
            const double* c = &K.coef[(n * km + k) * K.J];
            double s = 0;
            for (std::size_t i = 0; i < K.J; ++i) s += c[i] * c[i];
            tr[k] += f[n * km + k] * s;
        }
    return tr;
}

Eigen::VectorXd dense_response_eigenvalues(const FrequencyMap& fm, double lambda, int k_max, std::size_t theta_order)
{
    if (!(lambda < fm.omega_star * fm.omega_star)) throw NumericalError("inside essential spectrum");
    const std::size_t N = fm.nodes.size(), Q = theta_order, km = static_cast<std::size_t>(k_max);
    const auto& q = numerics::cached_legendre(Q);
    // per node: radii at Gauss nodes in theta and weighted cosines
    std::vector<double> radii(N * Q), wc(N * km * Q), amp(N * km);
    for (std::size_t a = 0; a < N; ++a) {
        const auto& nd = fm.nodes[a];
        for (std::size_t j = 0; j < Q; ++j) {
            const double th = 0.5 * M_PI * (q.nodes[j] + 1);
            radii[a * Q + j] = nd.orbit.radius(th);
            for (std::size_t k = 1; k <= km; ++k)
                wc[(a * km + k - 1) * Q + j] = 0.5 * M_PI * q.weights[j] * std::cos(double(k) * th);
        }
        for (std::size_t k = 1; k <= km; ++k) {
            const double kw = double(k) * nd.omega;
            amp[a * km + k - 1] = std::sqrt(nd.mass / M_PI) * kw / std::sqrt(kw * kw - lambda) * 2;
        }
    }
    const auto M = static_cast<Eigen::Index>(N * km);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(M, M);
    std::vector<double> inv(Q * Q);
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a; b < N; ++b) {
            for (std::size_t i = 0; i < Q; ++i)
                for (std::size_t j = 0; j < Q; ++j)
                    inv[i * Q + j] = 1 / std::max(radii[a * Q + i], radii[b * Q + j]);
            for (std::size_t k = 0; k < km; ++k)
                for (std::size_t l = 0; l < km; ++l) {
                    const double* ca = &wc[(a * km + k) * Q];
                    const double* cb = &wc[(b * km + l) * Q];
                    double s = 0;
                    for (std::size_t i = 0; i < Q; ++i) {
                        double row = 0;
                        for (std::size_t j = 0; j < Q; ++j) row += inv[i * Q + j] * cb[j];
                        s += ca[i] * row;
                    }
                    const double v = amp[a * km + k] * amp[b * km + l] * s;
                    const auto I = static_cast<Eigen::Index>(a * km + k), Jx = static_cast<Eigen::Index>(b * km + l);
                    K(I, Jx) = v;
                    K(Jx, I) = v;
                }
        }
    return numerics::sym_eig(K).values;
}

std::vector<double> lambda_grid(double omega_star, std::size_t points, double depth)
{
    if (points < 1) throw std::invalid_argument("lambda grid needs at least one point");
    std::vector<double> g(points, 0.0);
    const double w2 = omega_star * omega_star;
    for (std::size_t m = 1; m < points; ++m) g[m] = w2 * (1 - std::exp2(-depth * double(m) / double(points - 1)));
    return g;
}

Eigencurves eigencurves(const ResponseKernel& K, const std::vector<double>& lambdas, std::size_t top)
{
    Eigencurves ec;
    ec.lambda = lambdas;
    top = std::min(top, K.J);
    for (double lam : lambdas) {
        const Eigen::MatrixXd B = assemble_response(K, lam);
        const auto e = numerics::sym_eig(B);
        std::vector<double> nu(top);
        for (std::size_t i = 0; i < top; ++i) nu[i] = e.values(static_cast<Eigen::Index>(i));
        ec.nu.push_back(std::move(nu));
        ec.trace.push_back(B.trace());
    }
    return ec;
}

std::vector<Mode> locate_modes(const ResponseKernel& K, const Eigencurves& ec)
{
    std::vector<Mode> modes;
    if (ec.lambda.size() < 2) return modes;
    const double w2 = K.omega_star * K.omega_star;
    const std::size_t top = ec.nu.front().size();
    auto nu_at = [&](double lam, std::size_t i, Eigen::VectorXd* vec) {
        const auto e = numerics::sym_eig(assemble_response(K, lam));
        if (vec) *vec = e.vectors.col(static_cast<Eigen::Index>(i));
        return e.values(static_cast<Eigen::Index>(i));
    };
    for (std::size_t i = 0; i < top; ++i) {
        for (std::size_t m = 0; m + 1 < ec.lambda.size(); ++m) {
            if (!(ec.nu[m][i] < 1 && ec.nu[m + 1][i] >= 1)) continue;
            double lo = ec.lambda[m], hi = ec.lambda[m + 1];
            while (hi - lo > 1e-8 * w2) {
                const double mid = 0.5 * (lo + hi);
                if (nu_at(mid, i, nullptr) < 1)
                    lo = mid;
                else
                    hi = mid;
            }
            Mode md;
            md.lambda = 0.5 * (lo + hi);
            md.frequency = std::sqrt(md.lambda);
            md.curve = static_cast<int>(i) + 1;
            Eigen::VectorXd v;
            md.residual = std::abs(nu_at(md.lambda, i, &v) - 1);
            md.coefficients.assign(v.data(), v.data() + v.size());
            md.at_resolution_limit = (m + 2 == ec.lambda.size());
            modes.push_back(std::move(md));
        }
    }
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.lambda < b.lambda; });
    return modes;
}

}  // namespace antonov
