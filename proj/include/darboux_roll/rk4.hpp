#pragma once

#include <array>
#include <cstddef>

namespace darboux_roll {

/// One classical fourth-order Runge-Kutta step of y' = f(x, y).
template <std::size_t N, class Field>
[[nodiscard]] std::array<double, N> rk4_step(const Field& f, double x, const std::array<double, N>& y,
                                             double h) {
    auto axpy = [](const std::array<double, N>& base, double a, const std::array<double, N>& d) {
        std::array<double, N> out;
        for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + a * d[i];
        return out;
    };
    const std::array<double, N> k1 = f(x, y);
    const std::array<double, N> k2 = f(x + 0.5 * h, axpy(y, 0.5 * h, k1));
    const std::array<double, N> k3 = f(x + 0.5 * h, axpy(y, 0.5 * h, k2));
    const std::array<double, N> k4 = f(x + h, axpy(y, h, k3));
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

}  // namespace darboux_roll
