#pragma once

// Shared test utilities: temp directories and independent brute-force
// oracles. The oracles deliberately avoid the library's code paths.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testutil {

class TempDir {
public:
    TempDir() {
        auto tmpl = (std::filesystem::temp_directory_path() / "uniq_test_XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

namespace oracle {

// Type-7 quantile, written from the order-statistic definition.
inline double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double pos = p * static_cast<double>(n - 1);
    const std::size_t below = static_cast<std::size_t>(pos);
    const std::size_t above = below + 1 >= n ? n - 1 : below + 1;
    const double weight = pos - static_cast<double>(below);
    return (1.0 - weight) * values[below] + weight * values[above];
}

struct Box {
    double q1, median, q3, lower_whisker, upper_whisker;
    std::vector<double> outliers;
};

inline Box boxplot(const std::vector<double>& values) {
    Box b{};
    b.q1 = quantile(values, 0.25);
    b.median = quantile(values, 0.5);
    b.q3 = quantile(values, 0.75);
    const double iqr = b.q3 - b.q1;
    b.lower_whisker = b.q3;
    b.upper_whisker = b.q1;
    for (double v : values) {
        if (v >= b.q1 - 1.5 * iqr && v < b.lower_whisker) b.lower_whisker = v;
        if (v <= b.q3 + 1.5 * iqr && v > b.upper_whisker) b.upper_whisker = v;
    }
    for (double v : values)
        if (v < b.lower_whisker || v > b.upper_whisker) b.outliers.push_back(v);
    return b;
}

// Product-moment form, algebraically distinct from the centered-sum route.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    long double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxy += static_cast<long double>(x[i]) * y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        syy += static_cast<long double>(y[i]) * y[i];
    }
    const long double num = n * sxy - sx * sy;
    const long double den = std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    return static_cast<double>(num / den);
}

// Cyclic Jacobi eigensolver for small symmetric matrices. Returns
// eigenvalues descending with matching eigenvectors (columns).
inline void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                         std::vector<std::vector<double>>& eigenvectors) {
    const std::size_t n = a.size();
    eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = eigenvectors[k][p], vkq = eigenvectors[k][q];
                    eigenvectors[k][p] = c * vkp - s * vkq;
                    eigenvectors[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&a](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
    eigenvalues.resize(n);
    std::vector<std::vector<double>> sorted_vecs(n, std::vector<double>(n));
    for (std::size_t c = 0; c < n; ++c) {
        eigenvalues[c] = a[order[c]][order[c]];
        for (std::size_t r = 0; r < n; ++r) sorted_vecs[r][c] = eigenvectors[r][order[c]];
    }
    eigenvectors = std::move(sorted_vecs);
}

// Top-k principal subspace of a set of vectors, via the covariance matrix
// (usable when the dimension is small).
inline std::vector<std::vector<double>> pca_subspace(
    const std::vector<std::vector<double>>& samples, std::size_t k) {
    const std::size_t d = samples.front().size();
    std::vector<double> mean(d, 0.0);
    for (const auto& s : samples)
        for (std::size_t i = 0; i < d; ++i) mean[i] += s[i];
    for (auto& m : mean) m /= static_cast<double>(samples.size());

    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (const auto& s : samples)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                cov[i][j] += (s[i] - mean[i]) * (s[j] - mean[j]);
    for (auto& row : cov)
        for (auto& v : row) v /= static_cast<double>(samples.size());

    std::vector<double> evals;
    std::vector<std::vector<double>> evecs;
    jacobi_eigen(cov, evals, evecs);

    std::vector<std::vector<double>> basis(k, std::vector<double>(d));
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t r = 0; r < d; ++r) basis[c][r] = evecs[r][c];
    return basis;
}

// Frobenius distance between the projectors spanned by two bases
// (rows = basis vectors). Zero iff the subspaces coincide.
inline double projector_distance(const std::vector<std::vector<double>>& a,
                                 const std::vector<std::vector<double>>& b) {
    const std::size_t d = a.front().size();
    auto projector = [d](const std::vector<std::vector<double>>& basis) {
        std::vector<std::vector<double>> p(d, std::vector<double>(d, 0.0));
        for (const auto& u : basis)
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) p[i][j] += u[i] * u[j];
        return p;
    };
    const auto pa = projector(a), pb = projector(b);
    double acc = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = pa[i][j] - pb[i][j];
            acc += diff * diff;
        }
    return std::sqrt(acc);
}

}  // namespace oracle

}  // namespace testutil
