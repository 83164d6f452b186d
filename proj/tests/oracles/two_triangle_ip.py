"""Exact interior penalty matrix for two flat triangles sharing one edge.

Triangles (0,0,0),(1,0,0),(1,1,0) and (0,0,0),(1,1,0),(0,1,0), P1 Lagrange
basis in vertex order, element-major numbering. The bilinear form is written
in the planar textbook form

    sum_K int_K grad u . grad v + u v
  - int_e [u] . {grad v} + [v] . {grad u}
  + beta int_e (u+ - u-)(v+ - v-)

with [w] = w- n- + w+ n+, {g} = (g- + g+)/2, beta = omega / |e|, omega = 8,
and no boundary terms. Prints a C++ initializer list of the 36 entries.
"""

import sympy as sp

x, y, s = sp.symbols("x y s", real=True)

tris = [
    [sp.Matrix([0, 0]), sp.Matrix([1, 0]), sp.Matrix([1, 1])],
    [sp.Matrix([0, 0]), sp.Matrix([1, 1]), sp.Matrix([0, 1])],
]


def p1_basis(v):
    # Solve for affine functions a + b x + c y with nodal values.
    funcs = []
    M = sp.Matrix([[1, p[0], p[1]] for p in v])
    for i in range(3):
        e = sp.zeros(3, 1)
        e[i] = 1
        a, b, c = M.solve(e)
        funcs.append(a + b * x + c * y)
    return funcs


def integrate_triangle(f, v):
    # Map reference (r, t) to v0 + r (v1 - v0) + t (v2 - v0).
    r, t = sp.symbols("r t", real=True)
    p = v[0] + r * (v[1] - v[0]) + t * (v[2] - v[0])
    jac = sp.Abs((v[1] - v[0]).row_join(v[2] - v[0]).det())
    g = f.subs({x: p[0], y: p[1]}, simultaneous=True)
    return sp.integrate(sp.integrate(g * jac, (t, 0, 1 - r)), (r, 0, 1))


basis = [p1_basis(v) for v in tris]
grads = [[sp.Matrix([sp.diff(f, x), sp.diff(f, y)]) for f in b] for b in basis]

# Shared edge from (0,0) to (1,1); outward normals of each triangle.
a, b = sp.Matrix([0, 0]), sp.Matrix([1, 1])
length = sp.sqrt(2)
normals = [sp.Matrix([-1, 1]) / sp.sqrt(2), sp.Matrix([1, -1]) / sp.sqrt(2)]
omega = 8
beta = omega / length


def edge_integral(f):
    p = a + s * (b - a)
    return sp.integrate(f.subs({x: p[0], y: p[1]}, simultaneous=True) * length, (s, 0, 1))


n = 6
A = sp.zeros(n, n)
for K in range(2):
    for i in range(3):
        for j in range(3):
            A[3 * K + i, 3 * K + j] += integrate_triangle(
                grads[K][j].dot(grads[K][i]) + basis[K][j] * basis[K][i], tris[K]
            )

# Global face terms: u ranges over all 6 basis functions, v likewise.
def trace(K, i):
    return basis[K][i], grads[K][i]


for Ku in range(2):
    for i in range(3):
        for Kv in range(2):
            for j in range(3):
                u, gu = trace(Ku, i)
                v, gv = trace(Kv, j)
                jump_u = u * normals[Ku]
                jump_v = v * normals[Kv]
                avg_gu = gu / 2
                avg_gv = gv / 2
                consistency = jump_u.dot(avg_gv) + jump_v.dot(avg_gu)
                sign_u = 1 if Ku == 1 else -1
                sign_v = 1 if Kv == 1 else -1
                penalty = beta * sign_u * u * sign_v * v
                A[3 * Kv + j, 3 * Ku + i] += edge_integral(-consistency + penalty)

print("// Generated by tests/oracles/two_triangle_ip.py")
rows = []
for r in range(n):
    rows.append("    " + ", ".join(f"{float(sp.N(A[r, c], 30)):.17g}" for c in range(n)) + ",")
print("\n".join(rows))
