#pragma once

#include <cmath>
#include <type_traits>

namespace darboux_roll {

/// Forward-mode dual number a + b·ε with ε² = 0.
///
/// The value type may itself be a Dual, which gives nested directional
/// derivatives. Only the operations used by the kinematic fields are provided.
template <class T>
struct Dual {
    T val{};
    T eps{};

    constexpr Dual() = default;
    constexpr Dual(T v) : val(v), eps(T{}) {}  // NOLINT(google-explicit-constructor)
    constexpr Dual(T v, T e) : val(v), eps(e) {}
    template <class U>
        requires std::is_arithmetic_v<U> && (!std::is_same_v<U, T>)
    constexpr Dual(U v) : val(T(v)), eps(T{}) {}  // NOLINT(google-explicit-constructor)

    Dual& operator+=(const Dual& o) { val += o.val; eps += o.eps; return *this; }
    Dual& operator-=(const Dual& o) { val -= o.val; eps -= o.eps; return *this; }
    Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
    Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

    friend Dual operator+(const Dual& a, const Dual& b) { return {a.val + b.val, a.eps + b.eps}; }
    friend Dual operator-(const Dual& a, const Dual& b) { return {a.val - b.val, a.eps - b.eps}; }
    friend Dual operator-(const Dual& a) { return {-a.val, -a.eps}; }
    friend Dual operator*(const Dual& a, const Dual& b) {
        return {a.val * b.val, a.val * b.eps + a.eps * b.val};
    }
    friend Dual operator/(const Dual& a, const Dual& b) {
        T inv = T(1) / b.val;
        return {a.val * inv, (a.eps * b.val - a.val * b.eps) * inv * inv};
    }

    friend Dual sin(const Dual& a) {
        using std::cos;
        using std::sin;
        return {sin(a.val), a.eps * cos(a.val)};
    }
    friend Dual cos(const Dual& a) {
        using std::cos;
        using std::sin;
        return {cos(a.val), -(a.eps * sin(a.val))};
    }
    friend Dual tan(const Dual& a) {
        using std::tan;
        T t = tan(a.val);
        return {t, a.eps * (T(1) + t * t)};
    }
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

/// Strips all dual layers down to the underlying double.
template <class T>
[[nodiscard]] constexpr double primal(const T& x) {
    if constexpr (is_dual<T>::value) {
        return primal(x.val);
    } else {
        return static_cast<double>(x);
    }
}

}  // namespace darboux_roll
