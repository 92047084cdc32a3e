#pragma once

#include "conelab/numeric.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace conelab {

// Dense univariate polynomial, coefficients in ascending order. Trailing
// exact zeros are always stripped, so the zero polynomial has no coefficients.
template <class T>
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<T> c) : c_(c) { trim(); }
    explicit Polynomial(std::vector<T> c) : c_(std::move(c)) { trim(); }

    static Polynomial constant(const T& v) { return Polynomial(std::vector<T>{v}); }
    static Polynomial monomial(std::size_t k, const T& v = T(1)) {
        std::vector<T> c(k + 1, T(0));
        c[k] = v;
        return Polynomial(std::move(c));
    }
    // (z - r)
    static Polynomial linear_root(const T& r) { return Polynomial({T(0) - r, T(1)}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<T>& coeffs() const { return c_; }
    T coeff(std::size_t k) const { return k < c_.size() ? c_[k] : T(0); }
    T leading() const { return c_.empty() ? T(0) : c_.back(); }

    template <class U>
    U operator()(const U& x) const {
        U acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + U(*it);
        return acc;
    }

    Polynomial derivative() const {
        if (c_.size() < 2) return {};
        std::vector<T> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * T(static_cast<long>(k));
        return Polynomial(std::move(d));
    }

    // p(z + sigma)
    Polynomial shifted(const T& sigma) const {
        Polynomial acc;
        Polynomial lin({sigma, T(1)});
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lin + constant(*it);
        return acc;
    }

    Polynomial monic() const {
        if (c_.empty()) return {};
        return *this * (T(1) / c_.back());
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
        for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
        for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a) {
        std::vector<T> c(a.c_);
        for (auto& v : c) v = T(0) - v;
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const Polynomial& a, const T& s) {
        std::vector<T> c(a.c_);
        for (auto& v : c) v *= s;
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const T& s, const Polynomial& a) { return a * s; }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

    Polynomial pow(unsigned k) const {
        Polynomial r = constant(T(1));
        for (unsigned i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    // Euclidean division: *this = q * d + r with deg r < deg d.
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const {
        if (d.is_zero()) throw std::domain_error("polynomial division by zero");
        std::vector<T> r(c_);
        int dd = d.degree();
        int qd = degree() - dd;
        if (qd < 0) return {Polynomial{}, *this};
        std::vector<T> q(static_cast<std::size_t>(qd + 1), T(0));
        T inv = T(1) / d.leading();
        for (int k = qd; k >= 0; --k) {
            T f = r[static_cast<std::size_t>(k + dd)] * inv;
            q[static_cast<std::size_t>(k)] = f;
            for (int i = 0; i <= dd; ++i) r[static_cast<std::size_t>(k + i)] -= f * d.c_[static_cast<std::size_t>(i)];
            r[static_cast<std::size_t>(k + dd)] = T(0);
        }
        r.resize(static_cast<std::size_t>(dd));
        return {Polynomial(std::move(q)), Polynomial(std::move(r))};
    }

    // Drop leading coefficients below tol * max|c| (floating point only).
    Polynomial chopped(double tol) const {
        double scale = 0.0;
        for (const auto& v : c_) scale = std::max(scale, std::abs(v));
        std::vector<T> c(c_);
        while (!c.empty() && std::abs(c.back()) <= tol * scale) c.pop_back();
        return Polynomial(std::move(c));
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
    }
    std::vector<T> c_;
};

using RationalPoly = Polynomial<Rational>;
using ComplexPoly = Polynomial<Complex>;

ComplexPoly to_complex(const RationalPoly& p);

// Monic greatest common divisor over the rationals.
RationalPoly gcd(RationalPoly a, RationalPoly b);

// Square-free factorization: p = lc * prod f_i^{m_i}, each f_i monic and square-free.
std::vector<std::pair<RationalPoly, int>> square_free_factors(const RationalPoly& p);

// All complex roots (with repetition) via companion-matrix eigenvalues plus one
// Newton step per root.
std::vector<Complex> polynomial_roots(const ComplexPoly& p);

template <class T>
class RationalFunction {
public:
    RationalFunction() : num_(), den_(Polynomial<T>::constant(T(1))) {}
    RationalFunction(Polynomial<T> num, Polynomial<T> den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
        normalize();
    }
    static RationalFunction polynomial(Polynomial<T> p) { return RationalFunction(std::move(p), Polynomial<T>::constant(T(1))); }

    const Polynomial<T>& num() const { return num_; }
    const Polynomial<T>& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.degree() == 0; }

    template <class U>
    U operator()(const U& z) const { return num_(z) / den_(z); }

    RationalFunction shifted(const T& sigma) const { return RationalFunction(num_.shifted(sigma), den_.shifted(sigma)); }

    RationalFunction inverse() const {
        if (num_.is_zero()) throw std::domain_error("inverse of zero rational function");
        return RationalFunction(den_, num_);
    }

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
        if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
        return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RationalFunction operator-(const RationalFunction& a) { return RationalFunction(-a.num_, a.den_); }
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
        return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) { return a * b.inverse(); }
    friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

private:
    void normalize();
    Polynomial<T> num_;
    Polynomial<T> den_;
};

template <>
inline void RationalFunction<Rational>::normalize() {
    if (num_.is_zero()) {
        den_ = RationalPoly::constant(Rational(1));
        return;
    }
    RationalPoly g = gcd(num_, den_);
    if (g.degree() > 0) {
        num_ = num_.divmod(g).first;
        den_ = den_.divmod(g).first;
    }
    Rational lc = den_.leading();
    num_ = num_ * (Rational(1) / lc);
    den_ = den_.monic();
}

template <>
inline void RationalFunction<Complex>::normalize() {
    if (num_.is_zero()) {
        den_ = ComplexPoly::constant(Complex(1));
        return;
    }
    Complex lc = den_.leading();
    num_ = num_ * (Complex(1) / lc);
    den_ = den_.monic();
}

using RationalFunctionQ = RationalFunction<Rational>;
using RationalFunctionC = RationalFunction<Complex>;

RationalFunctionC to_complex(const RationalFunctionQ& f);

}  // namespace conelab
