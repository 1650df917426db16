"""Generate mms_oracle.hpp: symbolic u, u_t, grad u and Laplacian for the
manufactured cases. Run: python3 gen_mms_oracle.py > mms_oracle.hpp"""
import sympy as sp

t = sp.symbols("t", positive=True)
x = sp.symbols("x0:3", real=True)

cases = {
    "smooth_exp": (sp.exp(-t), 1),
    "singular_cubic": (t**3 - t**2 + 1, 1),
    "singular_threehalves": (t**sp.Rational(3, 2), 2),
}

print("// Generated by gen_mms_oracle.py with sympy; do not edit.")
print("#pragma once\n#include <array>\n#include <cmath>\n\nnamespace oracle {\n")
print("struct Derivs {\n  double u, u_t, lap;\n  std::array<double, 3> grad;\n};\n")
for name, (g, w) in cases.items():
    for d in (2, 3):
        u = g * sp.prod([sp.sin(w * sp.pi * x[i]) for i in range(d)])
        ut = sp.diff(u, t)
        grad = [sp.diff(u, x[i]) for i in range(d)] + [sp.Integer(0)] * (3 - d)
        lap = sum(sp.diff(u, x[i], 2) for i in range(d))
        code = lambda e: sp.cxxcode(sp.simplify(e), standard="c++17")
        print(f"inline Derivs {name}_{d}d(const std::array<double, 3>& x, double t) {{")
        print("  const double x0 = x[0], x1 = x[1], x2 = x[2];\n  (void)x2;")
        print(f"  return {{{code(u)}, {code(ut)}, {code(lap)},")
        print(f"          {{{code(grad[0])}, {code(grad[1])}, {code(grad[2])}}}}};\n}}\n")
    print(f"inline double {name}_time(double t) {{ return {sp.cxxcode(g)}; }}\n")
print("}  // namespace oracle")
