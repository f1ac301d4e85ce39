// Reference values computed once at 30 digits with an arbitrary-precision
// library and frozen here. None of them comes from the code under test.
#pragma once

namespace oracle {

inline constexpr double zero_zero_window = 0.303265329856316711801899767496;  // e^(-1/2)/2
inline constexpr double plateau_window = 0.275909580878581741196642827621;    // 3 e^(-1)/4
inline constexpr double zero_zero_window_a2b3 = 1.81959197913790027081139860497;
inline constexpr double k_omega01 = 0.945618300138255547593508618769;       // alpha = beta = 1
inline constexpr double k2_omega01 = 0.894193969556363951781000018671;
inline constexpr double gprime_omega01 = 3.17677587822545580712400007469;
inline constexpr double omega_bound_canonical = -3.68037821569457222118285612753;  // s=1, gamma=3, n=1, P0=4pi/3
inline constexpr double sqrt_04 = 0.632455532033675866399778708887;
inline constexpr double e_quarter = 1.28402541668774148407342056806;
inline constexpr double argmin_Q_omega02 = 0.878459432198035050809517409187;
inline constexpr double min_Q_omega02 = -0.143415284886649918439366216409;
inline constexpr double tent_J_bound = 2.38629436111989061883446424292;
inline constexpr double tent_optimized_bound = 2.35482004503094938202313865292;
inline constexpr double tent_J_exact = 1.45819711602371815441097297419;
inline constexpr double exp_moment_20 = 0.999999956715773928790285612715;   // int_0^20 e^-r r dr
inline constexpr double pi = 3.14159265358979323846264338328;

}  // namespace oracle
