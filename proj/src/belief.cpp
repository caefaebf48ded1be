#include "aoi/belief.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "aoi/io.hpp"

namespace aoi {

namespace {

void check_lambda(double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::invalid_argument("lambda must be in (0, 1], got " + std::to_string(lambda));
}

void check_capacity(int capacity) {
    if (capacity < 1)
        throw std::invalid_argument("capacity must be >= 1, got " + std::to_string(capacity));
}

Belief normalized(Belief b) {
    double sum = 0.0;
    for (double v : b) sum += v;
    if (!(sum > 0.0)) throw std::invalid_argument("belief has nonpositive mass");
    for (double& v : b) v /= sum;
    return b;
}

} // namespace

Matrix build_lambda(double lambda, int capacity) {
    check_lambda(lambda);
    check_capacity(capacity);
    const int n = capacity + 1;
    Matrix lam(n, n);
    for (int j = 0; j < n - 1; ++j) lam(j, j) = 1.0 - lambda;
    lam(n - 1, n - 1) = 1.0;
    for (int j = 1; j < n; ++j) lam(j, j - 1) = lambda;
    return lam;
}

Matrix lambda_power_closed_form(double lambda, int capacity, int m) {
    check_lambda(lambda);
    check_capacity(capacity);
    if (m < 0) throw std::invalid_argument("power must be >= 0");
    const int n = capacity + 1;
    Matrix out(n, n);
    for (int l = 0; l < n; ++l) {
        for (int j = l; j < n - 1; ++j) {
            const int k = j - l;
            if (k == 0) {
                out(j, l) = std::pow(1.0 - lambda, m);
                continue;
            }
            // C(m, k); exactly zero when m < k, so the pow factors are skipped.
            double coeff = 1.0;
            for (int v = 0; v < k; ++v) coeff *= static_cast<double>(m - v) / (v + 1);
            out(j, l) = (coeff == 0.0)
                            ? 0.0
                            : coeff * std::pow(lambda, k) * std::pow(1.0 - lambda, m - k);
        }
        double above = 0.0;
        for (int j = l; j < n - 1; ++j) above += out(j, l);
        out(n - 1, l) = 1.0 - above;
    }
    return out;
}

std::vector<Belief> rho_vectors(double lambda, int capacity) {
    check_lambda(lambda);
    check_capacity(capacity);
    const int n = capacity + 1;
    std::vector<Belief> rho(static_cast<size_t>(n), Belief(static_cast<size_t>(n), 0.0));
    rho[0][0] = 1.0 - lambda;
    rho[0][1] = lambda;
    rho[1] = rho[0];
    for (int j = 2; j <= capacity; ++j) {
        rho[j][j - 1] = 1.0 - lambda;
        rho[j][j] = lambda;
    }
    return rho;
}

Belief advance_belief(const Belief& beta, double lambda) {
    const int n = static_cast<int>(beta.size());
    Belief out(beta.size(), 0.0);
    out[0] = (1.0 - lambda) * beta[0];
    for (int j = 1; j < n - 1; ++j) out[j] = lambda * beta[j - 1] + (1.0 - lambda) * beta[j];
    out[n - 1] = lambda * beta[n - 2] + beta[n - 1];
    return out;
}

Belief update_belief(const Belief& beta, int a, const Observation& obs, double lambda) {
    check_lambda(lambda);
    const int capacity = static_cast<int>(beta.size()) - 1;
    check_capacity(capacity);
    if (a == 0) {
        if (obs.delta == 1)
            throw std::invalid_argument("inconsistent observation: delta' = 1 without a command");
        return normalized(advance_belief(beta, lambda));
    }
    const auto rho = rho_vectors(lambda, capacity);
    if (obs.delta > 1) return rho[0];
    if (obs.b_tilde < 1 || obs.b_tilde > capacity)
        throw std::invalid_argument("b_tilde out of range in observation");
    return rho[static_cast<size_t>(obs.b_tilde)];
}

int choose_m(double lambda, int capacity, double eps) {
    check_lambda(lambda);
    check_capacity(capacity);
    if (!(eps > 0.0) || eps >= 1.0)
        throw std::invalid_argument("eps must be in (0, 1)");
    if (lambda == 1.0) return std::max(capacity, 1);

    // Worst case over point-mass bases is the empty-battery column, whose
    // infinity-norm distance from the full point mass equals
    // Pr(Binomial(m, lambda) <= B-1).  Evaluated in log space so very small
    // lambda stays finite.
    const double log_l = std::log(lambda);
    const double log_q = std::log1p(-lambda);
    auto dist = [&](long long m) {
        double sum = 0.0;
        for (int k = 0; k < capacity; ++k) {
            double log_coeff = 0.0;
            for (int v = 0; v < k; ++v)
                log_coeff += std::log(static_cast<double>(m - v)) - std::log(static_cast<double>(v + 1));
            sum += std::exp(log_coeff + k * log_l + static_cast<double>(m - k) * log_q);
        }
        return sum;
    };

    long long hi = 1;
    while (dist(hi) > eps) {
        hi *= 2;
        if (hi > (1LL << 40))
            throw std::runtime_error("choose_m: eps unreachable at this lambda; pass m explicitly");
    }
    long long lo = hi / 2;  // dist(lo) > eps or lo == 0
    while (lo + 1 < hi) {
        const long long mid = lo + (hi - lo) / 2;
        (dist(mid) <= eps ? hi : lo) = mid;
    }
    return static_cast<int>(std::max(hi, 1LL));
}

TruncatedBeliefSpace TruncatedBeliefSpace::build(const Belief& beta0, double lambda,
                                                 int capacity, int m) {
    check_lambda(lambda);
    check_capacity(capacity);
    if (m < 1) throw std::invalid_argument("truncation depth must be >= 1");
    if (static_cast<int>(beta0.size()) != capacity + 1)
        throw std::invalid_argument("initial belief has wrong length");

    TruncatedBeliefSpace space;
    space.lambda_ = lambda;
    space.capacity_ = capacity;
    space.depth_ = m;
    space.table_.resize(static_cast<size_t>(capacity + 1) * (m + 1));

    const auto rho = rho_vectors(lambda, capacity);
    for (int row = 0; row <= capacity; ++row) {
        Belief cur = (row == 0) ? normalized(beta0) : rho[static_cast<size_t>(row)];
        for (int col = 0; col <= m; ++col) {
            space.table_[static_cast<size_t>(space.linear(row, col))] = cur;
            if (col < m) cur = advance_belief(cur, lambda);
        }
    }
    return space;
}

Belief TruncatedBeliefSpace::uniform_belief(int capacity) {
    check_capacity(capacity);
    return Belief(static_cast<size_t>(capacity + 1), 1.0 / (capacity + 1));
}

const Belief& TruncatedBeliefSpace::at(int row, int col) const {
    if (row < 0 || row > capacity_ || col < 0 || col > depth_)
        throw std::out_of_range("belief index out of range");
    return table_[static_cast<size_t>(linear(row, col))];
}

BeliefIndex TruncatedBeliefSpace::step_no_command(BeliefIndex idx) const {
    return {idx.row, std::min(idx.col + 1, depth_)};
}

BeliefIndex TruncatedBeliefSpace::reset_after_update(int b_tilde) const {
    if (b_tilde < 1 || b_tilde > capacity_)
        throw std::invalid_argument("b_tilde out of range");
    return {b_tilde, 0};
}

void TruncatedBeliefSpace::write_csv(std::ostream& out) const {
    out << "row,col";
    for (int j = 0; j <= capacity_; ++j) out << ",beta_" << j;
    out << "\n";
    for (int row = 0; row <= capacity_; ++row) {
        for (int col = 0; col <= depth_; ++col) {
            out << row << "," << col;
            for (double v : at(row, col)) out << "," << format_double(v);
            out << "\n";
        }
    }
}

} // namespace aoi
