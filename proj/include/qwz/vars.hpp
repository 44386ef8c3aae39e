#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace qwz {

// Fixed indeterminate universe.  x stands for q^k and y for q^n; a term's
// k-shift acts on rational functions as x -> q x, its n-shift as y -> q y.
// VT is an internal scratch indeterminate used by the dispersion resultant;
// it never appears in user-facing expressions.
enum Var : int { VQ = 0, VA, VB, VC, VD, VE, VZ, VX, VY, VT };
inline constexpr int NVARS = 10;
inline constexpr int NPARAMS = 6; // a..e, z

inline const char* var_name(int v) {
    static const char* names[NVARS] = {"q", "a", "b", "c", "d", "e", "z", "x", "y", "t"};
    return names[v];
}

inline std::optional<Var> var_from_name(std::string_view s) {
    for (int v = 0; v < NVARS; ++v)
        if (s == var_name(v)) return static_cast<Var>(v);
    return std::nullopt;
}

// Letter parameters a..e, z (excludes q, x, y).
inline bool is_param(int v) { return v >= VA && v <= VZ; }

// alpha*k + beta*n + gamma with integer coefficients.
struct LinForm {
    long k = 0, n = 0, c = 0;

    friend LinForm operator+(LinForm a, LinForm b) { return {a.k + b.k, a.n + b.n, a.c + b.c}; }
    friend LinForm operator-(LinForm a, LinForm b) { return {a.k - b.k, a.n - b.n, a.c - b.c}; }
    friend LinForm operator*(long s, LinForm a) { return {s * a.k, s * a.n, s * a.c}; }
    friend bool operator==(const LinForm&, const LinForm&) = default;
    friend auto operator<=>(const LinForm&, const LinForm&) = default;

    bool is_const() const { return k == 0 && n == 0; }
    long at(long kk, long nn) const { return k * kk + n * nn + c; }

    std::string str() const {
        std::string out;
        auto piece = [&](long coef, const char* sym) {
            if (coef == 0) return;
            if (!out.empty() && coef > 0) out += "+";
            if (coef == -1 && *sym) out += "-";
            else if (coef != 1 || !*sym) out += std::to_string(coef);
            if (*sym && (coef != 1 && coef != -1)) out += "*";
            out += sym;
        };
        piece(k, "k");
        piece(n, "n");
        piece(c, "");
        if (out.empty()) out = "0";
        return out;
    }
};

} // namespace qwz
