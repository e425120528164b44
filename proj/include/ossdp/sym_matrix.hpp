#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ossdp {

/// Dense symmetric N x N real matrix with full square storage.
/// set() writes both mirror entries; from_row_major() keeps the input
/// verbatim so near-symmetric external data can be inspected before use.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n)
        : n_(n), a_(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0) {
        if (n < 0) throw std::invalid_argument("SymMatrix: negative size");
    }

    static SymMatrix from_row_major(int n, std::vector<double> data) {
        if (data.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
            throw std::invalid_argument("SymMatrix: data size mismatch");
        SymMatrix m(n);
        m.a_ = std::move(data);
        return m;
    }

    /// E/N: every entry 1/N.
    static SymMatrix ones_over_n(int n) {
        SymMatrix m(n);
        for (auto& v : m.a_) v = 1.0 / n;
        return m;
    }

    /// I/N.
    static SymMatrix identity_over_n(int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m.set(i, i, 1.0 / n);
        return m;
    }

    int size() const { return n_; }

    double operator()(int i, int j) const { return a_[idx(i, j)]; }

    void set(int i, int j, double v) {
        a_[idx(i, j)] = v;
        a_[idx(j, i)] = v;
    }

    void add(int i, int j, double v) {
        a_[idx(i, j)] += v;
        if (i != j) a_[idx(j, i)] += v;
    }

    const std::vector<double>& row_major() const { return a_; }

    double max_asymmetry() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                m = std::max(m, std::abs(a_[idx(i, j)] - a_[idx(j, i)]));
        return m;
    }

private:
    size_t idx(int i, int j) const {
        return static_cast<size_t>(i) * static_cast<size_t>(n_) +
               static_cast<size_t>(j);
    }

    int n_ = 0;
    std::vector<double> a_;
};

}  // namespace ossdp
