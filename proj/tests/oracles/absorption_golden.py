"""Independent high-precision evaluation of the absorption chain.

Regenerates tests/support/golden.hpp. Written separately from the C++ code
and evaluated with 50-digit arithmetic.
"""
import mpmath as mp

mp.mp.dps = 50

T0 = mp.mpf("293.15")
T01 = mp.mpf("273.16")
PR = mp.mpf("101.325")


def psat(T):
    return PR * mp.power(10, mp.mpf("-6.8346") * mp.power(T01 / T, mp.mpf("1.261")) + mp.mpf("4.6151"))


def h_percent(T, pa, rh):
    return 100 * rh * psat(T) / pa


def fr_o(T, pa, rh):
    h = h_percent(T, pa, rh)
    return (pa / PR) * (24 + mp.mpf("4.04e4") * h * (mp.mpf("0.02") + h) / (mp.mpf("0.391") + h))


def fr_n(T, pa, rh):
    h = h_percent(T, pa, rh)
    tr = T / T0
    return (pa / PR) * mp.power(tr, mp.mpf("-0.5")) * (
        9 + 280 * h * mp.e ** (mp.mpf("-4.17") * (mp.power(tr, mp.mpf(-1) / 3) - 1)))


def alpha(f, T, pa, rh):
    f = mp.mpf(f)
    tr = T / T0
    fo, fn = fr_o(T, pa, rh), fr_n(T, pa, rh)
    classical = mp.mpf("1.84e-11") * (PR / pa) * mp.sqrt(tr)
    relax = mp.power(tr, mp.mpf("-2.5")) * (
        mp.mpf("0.01275") * mp.e ** (mp.mpf("-2239.1") / T) / (fo + f * f / fo)
        + mp.mpf("0.1068") * mp.e ** (mp.mpf("-3352.0") / T) / (fn + f * f / fn))
    return mp.mpf("8.686") * f * f * (classical + relax)


def main():
    T, pa, rh = T0, PR, mp.mpf("0.5")
    rows = [
        ("kPsat29315", psat(T)),
        ("kPsatTriple", psat(T01)),
        ("kHumidityPercent", h_percent(T, pa, rh)),
        ("kFrO", fr_o(T, pa, rh)),
        ("kFrN", fr_n(T, pa, rh)),
        ("kAlpha1k", alpha(1000, T, pa, rh)),
    ]
    print("#pragma once")
    print("// Generated by tests/oracles/absorption_golden.py (50-digit mpmath). 20 C, 101.325 kPa, 50 % RH.")
    print("namespace golden {")
    for name, v in rows:
        print(f"inline constexpr double {name} = {mp.nstr(v, 20)};")
    print("struct AlphaPoint { double f; double alpha_db_per_m; };")
    print("inline constexpr AlphaPoint kAlphaLog20[] = {")
    for i in range(20):
        f = mp.power(10, mp.log10(20) + i * (mp.log10(20000) - mp.log10(20)) / 19)
        f = mp.mpf(mp.nstr(f, 17))
        print(f"    {{{mp.nstr(f, 17)}, {mp.nstr(alpha(f, T, pa, rh), 20)}}},")
    print("};")
    cold = (mp.mpf("273.15"), mp.mpf("90.0"), mp.mpf("0.3"))
    print("// 0 C, 90 kPa, 30 % RH: exercises every temperature and pressure factor.")
    for f in (500, 8000):
        print(f"inline constexpr double kAlphaCold{f} = {mp.nstr(alpha(f, *cold), 20)};")
    print("}  // namespace golden")


if __name__ == "__main__":
    main()
