#include "fsnull/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsnull/error.hpp"
#include "fsnull/random.hpp"

namespace fsnull {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double normalize(Vec& v) {
    const double norm = std::sqrt(dot(v, v));
    if (norm > 0.0) {
        for (auto& x : v) x /= norm;
    }
    return norm;
}

void project_out(Vec& v, const std::vector<Vec>& basis) {
    for (const auto& b : basis) {
        const double c = dot(v, b);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
}

// Xc * v (length n) and Xc^T * u (length p).
Vec times(const Matrix& Xc, const Vec& v) {
    Vec out(Xc.rows(), 0.0);
    for (std::size_t i = 0; i < Xc.rows(); ++i) {
        const auto row = Xc.row(i);
        out[i] = std::inner_product(row.begin(), row.end(), v.begin(), 0.0);
    }
    return out;
}

Vec transpose_times(const Matrix& Xc, const Vec& u) {
    Vec out(Xc.cols(), 0.0);
    for (std::size_t i = 0; i < Xc.rows(); ++i) {
        const auto row = Xc.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) out[j] += u[i] * row[j];
    }
    return out;
}

// Symmetric operator for the chosen side, scaled by 1 / (n - 1).
class CovarianceOperator {
public:
    CovarianceOperator(const Matrix& Xc, bool gram_side) : Xc_(Xc), gram_(gram_side) {
        const std::size_t dim = gram_ ? Xc.rows() : Xc.cols();
        scale_ = 1.0 / static_cast<double>(Xc.rows() - 1);
        if (dim <= kExplicitLimit) {
            explicit_ = Matrix(dim, dim, 0.0);
            for (std::size_t a = 0; a < dim; ++a) {
                for (std::size_t b = a; b < dim; ++b) {
                    double s = 0.0;
                    if (gram_) {
                        const auto ra = Xc.row(a);
                        const auto rb = Xc.row(b);
                        s = std::inner_product(ra.begin(), ra.end(), rb.begin(), 0.0);
                    } else {
                        for (std::size_t i = 0; i < Xc.rows(); ++i) s += Xc(i, a) * Xc(i, b);
                    }
                    explicit_(a, b) = explicit_(b, a) = s * scale_;
                }
            }
        }
    }

    std::size_t dim() const { return gram_ ? Xc_.rows() : Xc_.cols(); }

    Vec apply(const Vec& v) const {
        if (!explicit_.empty()) {
            Vec out(v.size(), 0.0);
            for (std::size_t a = 0; a < v.size(); ++a) {
                const auto row = explicit_.row(a);
                out[a] = std::inner_product(row.begin(), row.end(), v.begin(), 0.0);
            }
            return out;
        }
        Vec out = gram_ ? times(Xc_, transpose_times(Xc_, v)) : transpose_times(Xc_, times(Xc_, v));
        for (auto& x : out) x *= scale_;
        return out;
    }

private:
    static constexpr std::size_t kExplicitLimit = 2048;
    const Matrix& Xc_;
    bool gram_;
    double scale_ = 1.0;
    Matrix explicit_;
};

Vec start_vector(std::size_t dim, std::size_t component) {
    // All-ones with a fixed pseudo-random perturbation, so that no
    // structured eigenvector can be exactly orthogonal to it.
    Xoshiro256 rng(0x5043415354415254ULL + component);
    Vec v(dim);
    for (auto& x : v) x = 1.0 + (rng.uniform01() - 0.5);
    return v;
}

}  // namespace

PcaResult pca_project(const Matrix& X, std::size_t d, const PcaOptions& options) {
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    if (n < 2 || p < 1) throw Error(ErrorCode::InvalidArgument, "pca needs at least 2 samples and 1 feature");
    if (d < 1 || d > std::min(n - 1, p)) {
        throw Error(ErrorCode::InvalidArgument, "pca dimension must lie in [1, min(n - 1, p)]");
    }

    Matrix Xc = X;
    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += Xc(i, j);
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) Xc(i, j) -= mean;
    }

    PcaResult result;
    double sum_sq = 0.0;
    for (const double v : Xc.data()) sum_sq += v * v;
    result.total_variance = sum_sq / static_cast<double>(n - 1);

    const bool gram_side = n <= p;
    const CovarianceOperator op(Xc, gram_side);
    const double floor = 1e-12 * std::max(result.total_variance, 1e-300);

    std::vector<Vec> side_basis;  // eigenvectors on the operator side
    std::vector<Vec> components;  // feature-space directions
    for (std::size_t c = 0; c < d; ++c) {
        Vec v = start_vector(op.dim(), c);
        project_out(v, side_basis);
        if (normalize(v) == 0.0) {
            result.rank_deficient = true;
            break;
        }
        double lambda = 0.0;
        for (std::size_t it = 0; it < options.max_iterations; ++it) {
            Vec w = op.apply(v);
            project_out(w, side_basis);
            const double next = dot(v, w);
            // Residual of the eigen-equation; the Rayleigh quotient error is
            // quadratic in it, so this is much stricter than watching lambda.
            double residual = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) residual += (w[i] - next * v[i]) * (w[i] - next * v[i]);
            residual = std::sqrt(residual);
            const double norm = normalize(w);
            if (norm == 0.0) {
                lambda = 0.0;
                break;
            }
            v = std::move(w);
            lambda = next;
            if (residual <= options.relative_tolerance * std::abs(next)) break;
        }
        if (!(lambda > floor)) {
            result.rank_deficient = true;
            break;
        }
        side_basis.push_back(v);

        Vec component = gram_side ? transpose_times(Xc, v) : v;
        project_out(component, components);
        if (normalize(component) == 0.0) {
            result.rank_deficient = true;
            break;
        }
        const auto largest = std::max_element(component.begin(), component.end(),
                                              [](double a, double b) { return std::abs(a) < std::abs(b); });
        if (*largest < 0.0) {
            for (auto& x : component) x = -x;
        }
        components.push_back(std::move(component));
    }

    // Near-equal eigenvalues can come out in slightly the wrong order.
    std::vector<double> variances;
    for (const auto& comp : components) {
        const Vec scores = times(Xc, comp);
        variances.push_back(dot(scores, scores));
    }
    std::vector<std::size_t> order(components.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return variances[a] > variances[b]; });
    std::vector<Vec> sorted;
    for (const auto i : order) sorted.push_back(std::move(components[i]));
    components = std::move(sorted);

    const std::size_t got = components.size();
    result.components = Matrix(got, p);
    result.projection = Matrix(n, got);
    for (std::size_t c = 0; c < got; ++c) {
        std::copy(components[c].begin(), components[c].end(), result.components.row(c).begin());
        const Vec scores = times(Xc, components[c]);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            result.projection(i, c) = scores[i];
            var += scores[i] * scores[i];
        }
        var /= static_cast<double>(n - 1);
        result.eigenvalues.push_back(var);
        result.explained_variance_ratio.push_back(
            result.total_variance > 0.0 ? var / result.total_variance : 0.0);
    }
    return result;
}

}  // namespace fsnull
