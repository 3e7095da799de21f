#include "antonov/response.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace antonov {

namespace {
constexpr std::size_t kInnerOrder = 48;
constexpr std::size_t kGramOrder = 64;

const numerics::QuadratureRule& edge_rule(std::size_t n, double e)
{
    return e == 0 ? numerics::cached_legendre(n) : numerics::cached_jacobi(n, e, 0);
}

void apply_transform(const Eigen::MatrixXd& T, const std::vector<double>& raw, double* out)
{
    const Eigen::Index J = T.rows();
    for (Eigen::Index i = 0; i < J; ++i) {
        double s = 0;
        for (Eigen::Index j = 0; j <= i; ++j) s += raw[static_cast<std::size_t>(j)] * T(j, i);
        out[i] = s;
    }
}
}  // namespace

void PotentialDensityBasis::profiles(double r, double* out) const
{
    if (family_ == BasisFamily::legendre) {
        const double x = 2 * r / R0_ - 1;
        double p0 = 1, p1 = x;
        out[0] = 1;
        if (J_ > 1) out[1] = x;
        for (std::size_t j = 2; j < J_; ++j) {
            const double p2 = ((2.0 * j - 1) * x * p1 - (j - 1.0) * p0) / j;
            out[j] = p2;
            p0 = p1;
            p1 = p2;
        }
        return;
    }
    for (std::size_t j = 0; j < J_; ++j) {
        const double x = (j + 1.0) * M_PI * r / R0_;
        out[j] = x < 1e-4 ? 1 - x * x / 6 : std::sin(x) / x;
    }
}

PotentialDensityBasis::PotentialDensityBasis(double R0, std::size_t J, BasisFamily family, double edge_exponent)
    : R0_(R0), J_(J), family_(family), edge_(edge_exponent)
{
    if (J < 1) throw std::invalid_argument("basis needs J >= 1");
    if (!(R0 > 0)) throw std::invalid_argument("basis needs a positive support radius");
    if (!(edge_exponent >= 0)) throw std::invalid_argument("basis edge exponent must be >= 0");
    moment2_.assign(J, 0.0);
    {
        const auto& q = edge_rule(kGramOrder, edge_);
        std::vector<double> rho(J);
        const double scale = 0.5 * R0 * std::pow(0.5, edge_);
        for (std::size_t k = 0; k < q.order(); ++k) {
            const double x = 0.5 * R0 * (q.nodes[k] + 1);
            profiles(x, rho.data());
            for (std::size_t j = 0; j < J; ++j) moment2_[j] += scale * q.weights[k] * x * x * rho[j];
        }
    }
    gram_ = gram(kGramOrder, false);
    gram_ = 0.5 * (gram_ + gram_.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(gram_);
    if (llt.info() != Eigen::Success) throw NumericalError("redundant basis");
    const Eigen::MatrixXd Lc = llt.matrixL();
    const double dmax = gram_.diagonal().maxCoeff();
    for (Eigen::Index i = 0; i < Lc.rows(); ++i)
        if (!(Lc(i, i) * Lc(i, i) > 1e-14 * dmax)) throw NumericalError("redundant basis");
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(J));
    // T = L^{-T}, then one more pass on T^T G T to remove round-off
    T_ = Lc.transpose().triangularView<Eigen::Upper>().solve(I);
    Eigen::MatrixXd G2 = T_.transpose() * gram_ * T_;
    G2 = 0.5 * (G2 + G2.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt2(G2);
    if (llt2.info() != Eigen::Success) throw NumericalError("redundant basis");
    const Eigen::MatrixXd L2 = llt2.matrixL();
    T_ = (T_ * L2.transpose().triangularView<Eigen::Upper>().solve(I)).eval();
}

Eigen::MatrixXd PotentialDensityBasis::gram(std::size_t order, bool orthonormal) const
{
    // 4 pi int rho_i Lambda_j r^2 dr, the edge factor taken into the rule
    const auto& q = edge_rule(order, edge_);
    const auto J = static_cast<Eigen::Index>(J_);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(J, J);
    std::vector<double> rho(J_), lam(J_), tmp(J_);
    const double scale = 0.5 * R0_ * std::pow(0.5, edge_) * 4 * M_PI;
    for (std::size_t a = 0; a < q.order(); ++a) {
        const double r = 0.5 * R0_ * (q.nodes[a] + 1);
        const double w = scale * q.weights[a] * r * r;
        profiles(r, rho.data());
        raw_potential(r, lam.data());
        if (orthonormal) {
            tmp = rho;
            apply_transform(T_, tmp, rho.data());
            tmp = lam;
            apply_transform(T_, tmp, lam.data());
        }
        for (Eigen::Index i = 0; i < J; ++i)
            for (Eigen::Index j = 0; j < J; ++j)
                G(i, j) += w * rho[static_cast<std::size_t>(i)] * lam[static_cast<std::size_t>(j)];
    }
    return G;
}

void PotentialDensityBasis::raw_density(double r, double* out) const
{
    if (r >= R0_ || r < 0) {
        for (std::size_t j = 0; j < J_; ++j) out[j] = 0;
        return;
    }
    profiles(r, out);
    if (edge_ != 0) {
        const double f = std::pow(1 - r / R0_, edge_);
        for (std::size_t j = 0; j < J_; ++j) out[j] *= f;
    }
}

void PotentialDensityBasis::raw_potential(double r, double* out) const
{
    // 4 pi [ (1/r) int_0^a rho r'^2 + int_a^R0 rho r' ], a = min(r, R0)
    std::vector<double> rho(J_), inner(J_, 0.0), outer(J_, 0.0);
    const double a = std::min(std::max(r, 0.0), R0_);
    // int_b^R0 rho x^m dx with the edge factor in the rule
    auto tail = [&](double b, int m, std::vector<double>& acc) {
        const double h = R0_ - b;
        if (!(h > 0)) return;
        const auto& q = edge_rule(kInnerOrder, edge_);
        const double scale = 0.5 * h * std::pow(0.5 * h / R0_, edge_);
        for (std::size_t k = 0; k < q.order(); ++k) {
            const double x = b + 0.5 * h * (q.nodes[k] + 1);
            const double w = scale * q.weights[k] * std::pow(x, m);
            profiles(x, rho.data());
            for (std::size_t j = 0; j < J_; ++j) acc[j] += w * rho[j];
        }
    };
    if (a > 0 && (edge_ == 0 || a <= 0.5 * R0_)) {
        const auto& q = numerics::cached_legendre(kInnerOrder);
        for (std::size_t k = 0; k < q.order(); ++k) {
            const double x = 0.5 * a * (q.nodes[k] + 1);
            const double w = 0.5 * a * q.weights[k] * x * x;
            raw_density(x, rho.data());
            for (std::size_t j = 0; j < J_; ++j) inner[j] += w * rho[j];
        }
    } else if (a > 0) {
        std::vector<double> rest(J_, 0.0);
        tail(a, 2, rest);
        for (std::size_t j = 0; j < J_; ++j) inner[j] = moment2_[j] - rest[j];
    }
    tail(a, 1, outer);
    for (std::size_t j = 0; j < J_; ++j) out[j] = 4 * M_PI * (a > 0 ? inner[j] / r + outer[j] : outer[j]);
}

void PotentialDensityBasis::density(double r, double* out) const
{
    std::vector<double> raw(J_);
    raw_density(r, raw.data());
    apply_transform(T_, raw, out);
}

void PotentialDensityBasis::potential(double r, double* out) const
{
    std::vector<double> raw(J_);
    raw_potential(r, raw.data());
    apply_transform(T_, raw, out);
}

Eigen::MatrixXd PotentialDensityBasis::orthonormal_gram() const
{
    return gram(80, true);
}

double coulomb_product(const std::function<double(double)>& rho, const std::function<double(double)>& sigma,
                       double R, std::size_t order)
{
    // (4 pi)^2 int int rho(r) sigma(r') r^2 r'^2 / max(r, r'), split at r' = r
    const auto& q = numerics::cached_legendre(order);
    double total = 0;
    for (std::size_t a = 0; a < q.order(); ++a) {
        const double r = 0.5 * R * (q.nodes[a] + 1);
        double inner = 0;
        for (std::size_t b = 0; b < q.order(); ++b) {
            const double x1 = 0.5 * r * (q.nodes[b] + 1);
            inner += 0.5 * r * q.weights[b] * sigma(x1) * x1 * x1 / r;
            const double x2 = r + 0.5 * (R - r) * (q.nodes[b] + 1);
            inner += 0.5 * (R - r) * q.weights[b] * sigma(x2) * x2;
        }
        total += 0.5 * R * q.weights[a] * rho(r) * r * r * inner;
    }
    return 16 * M_PI * M_PI * total;
}

double coulomb_self_energy(const std::function<double(double)>& rho, double R, std::size_t order)
{
    return 0.5 * coulomb_product(rho, rho, R, order);
}

}  // namespace antonov
