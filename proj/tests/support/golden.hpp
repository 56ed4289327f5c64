#pragma once
// Generated by tests/oracles/absorption_golden.py (50-digit mpmath). 20 C, 101.325 kPa, 50 % RH.
namespace golden {
inline constexpr double kPsat29315 = 2.3366304529761549697;
inline constexpr double kPsatTriple = 0.61124681955664046976;
inline constexpr double kHumidityPercent = 1.1530374798796718331;
inline constexpr double kFrO = 35413.859616811026322;
inline constexpr double kFrN = 331.85049436630811326;
inline constexpr double kAlpha1k = 0.0046647318738214833779;
struct AlphaPoint { double f; double alpha_db_per_m; };
inline constexpr AlphaPoint kAlphaLog20[] = {
    {20.0, 0.000012717710323965787787},
    {28.768997765753257, 0.000026218586810775121956},
    {41.382761622295793, 0.000053843218534460182651},
    {59.527028832626365, 0.00010970961383198866822},
    {85.626647974387878, 0.00022007656429395977935},
    {123.16964221320527, 0.00042846110423273294413},
    {177.17335808201653, 0.00079092916097727628864},
    {254.85499714062676, 0.0013435737153461489484},
    {366.59614216648719, 0.0020541093205943309051},
    {527.33017974607165, 0.0028485504787828049776},
    {758.53803814644993, 0.0037533445690794001926},
    {1091.1189562337038, 0.0050301348046871099953},
    {1569.5199407029225, 0.007285058252912189646},
    {2257.6757833693781, 0.011722073275235998438},
    {3247.5534783774436, 0.020737602130586706887},
    {4671.4429381802446, 0.03911523255112629768},
    {6719.6365725675643, 0.076200569775683906764},
    {9665.8604771435063, 0.14925504402057858238},
    {13903.855923551212, 0.28657032586413042291},
    {20000.0, 0.52415595711469964526},
};
// 0 C, 90 kPa, 30 % RH: exercises every temperature and pressure factor.
inline constexpr double kAlphaCold500 = 0.0035110393020792203765;
inline constexpr double kAlphaCold8000 = 0.10138686453404796659;
}  // namespace golden
