"""Regenerate the frozen symbolic fixtures used by the test suite.

Everything here is computed with exact rational arithmetic (sympy) and
printed; the numbers are copied into the tests by hand.  Run:

    python3 tools/make_fixtures.py
"""

from fractions import Fraction

import sympy as sp

x, y = sp.symbols("x y")


def tri_integrate(expr, verts):
    """Exact integral of expr(x, y) over the triangle with the given vertices."""
    (x0, y0), (x1, y1), (x2, y2) = [(sp.Rational(a), sp.Rational(b)) for a, b in verts]
    s, t = sp.symbols("s t")
    xx = x0 + (x1 - x0) * s + (x2 - x0) * t
    yy = y0 + (y1 - y0) * s + (y2 - y0) * t
    jac = sp.Abs((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
    inner = sp.integrate(sp.sympify(expr).subs({x: xx, y: yy}) * jac, (t, 0, 1 - s))
    return sp.nsimplify(sp.integrate(inner, (s, 0, 1)))


def edge_integrate(expr, p0, p1):
    """Exact line integral of expr(x, y) along the segment p0 -> p1."""
    t = sp.Symbol("t")
    (x0, y0), (x1, y1) = [(sp.Rational(a), sp.Rational(b)) for a, b in (p0, p1)]
    xx = x0 + (x1 - x0) * t
    yy = y0 + (y1 - y0) * t
    length = sp.sqrt((x1 - x0) ** 2 + (y1 - y0) ** 2)
    return sp.integrate(sp.sympify(expr).subs({x: xx, y: yy}) * length, (t, 0, 1))


def w_basis_type2(centered_at=None):
    """Monomial basis of [P1]^2, optionally centered."""
    cx, cy = centered_at if centered_at else (0, 0)
    dx, dy = x - cx, y - cy
    fields = [(1, 0), (dx, 0), (dy, 0), (0, 1), (0, dx), (0, dy)]
    divs = [0, 1, 0, 0, 0, 1]
    return fields, divs


def w_basis_type1(centered_at=None):
    """Basis of [P0]^2 + P0*(x, y), optionally centered."""
    cx, cy = centered_at if centered_at else (0, 0)
    fields = [(1, 0), (0, 1), (x - cx, y - cy)]
    divs = [0, 0, 2]
    return fields, divs


def outward_normal(a, b, opposite):
    """Unit outward normal of segment a->b for the triangle containing `opposite`."""
    ax, ay = a
    bx, by = b
    tx, ty = bx - ax, by - ay
    n = sp.Matrix([ty, -tx])
    n = n / sp.sqrt(n.dot(n))
    mid = sp.Matrix([(ax + bx) / sp.S(2), (ay + by) / sp.S(2)])
    toward = sp.Matrix(opposite) - mid
    if n.dot(toward) > 0:
        n = -n
    return n


def local_wg_matrices(verts, family, centered=True):
    """Exact G_i, G_b, W-mass for one physical triangle.

    Face coefficients are stacked per local edge (v0v1, v1v2, v2v0), each edge
    carrying the endpoint-Lagrange basis ordered by ascending vertex tuple
    position (the endpoint with the smaller coordinate tuple in the *global*
    sorted ordering comes first).  For this oracle we pass edges explicitly.
    """
    vv = [sp.Matrix([sp.Rational(a), sp.Rational(b)]) for a, b in verts]
    cx = sum(v[0] for v in vv) / 3
    cy = sum(v[1] for v in vv) / 3
    if family == "type2":
        fields, divs = w_basis_type2((cx, cy) if centered else None)
        mdim = 2
    else:
        fields, divs = w_basis_type1((cx, cy) if centered else None)
        mdim = 1
    nw = len(fields)
    Mw = sp.zeros(nw, nw)
    for i in range(nw):
        for j in range(i, nw):
            val = tri_integrate(
                sp.expand(fields[i][0] * fields[j][0] + fields[i][1] * fields[j][1]), verts
            )
            Mw[i, j] = Mw[j, i] = val
    # interior coupling  D[l] = (div q_l, 1)_T
    D = sp.Matrix([divs[l] * tri_integrate(sp.S(1), verts) for l in range(nw)])
    # boundary coupling N[l, edge*mdim + m] = <eta_m, q_l . n>_edge
    edges = [(0, 1), (1, 2), (2, 0)]
    N = sp.zeros(nw, 3 * mdim)
    for e, (i0, i1) in enumerate(edges):
        a, b = verts[i0], verts[i1]
        # global orientation: sort endpoints lexicographically by coordinates
        if tuple(map(sp.Rational, a)) > tuple(map(sp.Rational, b)):
            a, b = b, a
        opp = verts[3 - i0 - i1]
        n = outward_normal(a, b, opp)
        t = sp.Symbol("t")
        for l in range(nw):
            qn = fields[l][0] * n[0] + fields[l][1] * n[1]
            if mdim == 1:
                etas = [sp.S(1)]
            else:
                # Lagrange along a->b: eta0 = 1-t, eta1 = t, in arclength param
                etas = None
            if mdim == 1:
                N[l, e] = edge_integrate(qn, a, b)
            else:
                (ax, ay), (bx, by) = (a[0], a[1]), (b[0], b[1])
                xx = ax + (bx - ax) * t
                yy = ay + (by - ay) * t
                length = sp.sqrt((bx - ax) ** 2 + (by - ay) ** 2)
                qn_t = sp.sympify(qn).subs({x: xx, y: yy})
                N[l, 2 * e + 0] = sp.integrate(qn_t * (1 - t) * length, (t, 0, 1))
                N[l, 2 * e + 1] = sp.integrate(qn_t * t * length, (t, 0, 1))
    Gi = -Mw.inv() * D
    Gb = Mw.inv() * N
    return Gi, Gb, Mw, mdim


def local_stiffness(verts, family):
    Gi, Gb, Mw, mdim = local_wg_matrices(verts, family)
    G = Gi.row_join(Gb)
    return (G.T * Mw * G), mdim


def fixture_weak_gradient_edge_indicator():
    """Type 2 on the reference triangle: grad_w^b of (1 on edge y=0, 0 elsewhere)."""
    verts = [(0, 0), (1, 0), (0, 1)]
    fields, divs = w_basis_type2()  # uncentered monomials for readability
    Mw = sp.zeros(6, 6)
    for i in range(6):
        for j in range(i, 6):
            Mw[i, j] = Mw[j, i] = tri_integrate(
                sp.expand(fields[i][0] * fields[j][0] + fields[i][1] * fields[j][1]), verts
            )
    # mu = 1 on the edge y=0 (outward normal (0,-1)), 0 on the other edges
    m = sp.Matrix([edge_integrate(-fields[l][1], (0, 0), (1, 0)) for l in range(6)])
    g = Mw.inv() * m
    field = (
        g[0] + g[1] * x + g[2] * y,
        g[3] + g[4] * x + g[5] * y,
    )
    print("== weak-gradient edge-indicator fixture (type2, reference triangle) ==")
    print("monomial coefficients (1, x, y) per component:")
    print("  gx:", [sp.nsimplify(g[i]) for i in range(3)])
    print("  gy:", [sp.nsimplify(g[i]) for i in range(3, 6)])
    for vx, vy in [(0, 0), (1, 0), (0, 1)]:
        vals = [sp.nsimplify(c.subs({x: vx, y: vy})) for c in field]
        print(f"  value at ({vx},{vy}):", vals)
    norm2 = tri_integrate(sp.expand(field[0] ** 2 + field[1] ** 2), verts)
    print("  ||grad_w^b mu||_T^2 =", sp.nsimplify(norm2))


def fixture_two_triangle_matrices():
    """Exact A_h for the two-triangle mesh, both families, a = identity."""
    v = [(0, 0), (1, 0), (1, 1), (0, 1)]
    cells = [(0, 1, 2), (0, 2, 3)]
    # global edges sorted lexicographically by vertex pair:
    # (0,1) (0,2) (0,3) (1,2) (2,3); only (0,2) is interior
    for family, mdim in (("type2", 2), ("type1", 1)):
        M = 2  # cell dofs
        N = mdim  # one interior edge
        A = sp.zeros(M + N, M + N)
        for ci, cell in enumerate(cells):
            verts = [v[i] for i in cell]
            K, _ = local_stiffness(verts, family)
            # local face order: (v0,v1), (v1,v2), (v2,v0) of the *cell*
            loc_edges = [
                tuple(sorted((cell[0], cell[1]))),
                tuple(sorted((cell[1], cell[2]))),
                tuple(sorted((cell[2], cell[0]))),
            ]
            gdof = [ci]  # interior dof
            for e in loc_edges:
                for mm in range(mdim):
                    if e == (0, 2):
                        gdof.append(2 + mm)
                    else:
                        gdof.append(None)
            for i, gi in enumerate(gdof):
                if gi is None:
                    continue
                for j, gj in enumerate(gdof):
                    if gj is None:
                        continue
                    A[gi, gj] += K[i, j]
        print(f"== two-triangle golden matrix ({family}, a=I) ==")
        sp.pprint(sp.nsimplify(A))
        print("floats:")
        for i in range(M + N):
            print("  ", [float(A[i, j]) for j in range(M + N)])


def fixture_crisscross1_p1():
    """P1 stiffness of the criss-cross-1 mesh: single interior vertex."""
    verts = [(0, 0), (1, 0), (1, 1), (0, 1), (sp.Rational(1, 2), sp.Rational(1, 2))]
    cells = [(0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4)]
    total = sp.S(0)
    for cell in cells:
        vv = [sp.Matrix(list(map(sp.Rational, verts[i]))) for i in cell]
        area = sp.Rational(1, 2) * sp.Abs(
            (vv[1][0] - vv[0][0]) * (vv[2][1] - vv[0][1])
            - (vv[2][0] - vv[0][0]) * (vv[1][1] - vv[0][1])
        )
        # gradient of the hat at local vertex 2 (the center)
        e1 = vv[1] - vv[0]
        e2 = vv[2] - vv[0]
        B = sp.Matrix([[e1[0], e2[0]], [e1[1], e2[1]]])
        grads_ref = sp.Matrix([[-1, -1], [1, 0], [0, 1]])  # rows: d(lambda_i)
        grads = grads_ref * B.inv()
        g = grads.row(2)
        total += area * (g[0] ** 2 + g[1] ** 2)
    print("== criss-cross-1 P1 stiffness (center vertex) ==")
    print("  value:", sp.nsimplify(total))


if __name__ == "__main__":
    fixture_weak_gradient_edge_indicator()
    fixture_two_triangle_matrices()
    fixture_crisscross1_p1()
