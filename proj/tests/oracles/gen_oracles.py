"""Reference values for the unit tests, computed independently with mpmath
at 40 digits. Run: python3 gen_oracles.py"""
from mpmath import mp, mpf, loggamma, digamma, betainc, beta, log, exp, quad, inf, ncdf, npdf, sqrt, findroot

mp.dps = 40


def show(label, v):
    print(f"{label:<44} {mp.nstr(v, 17)}")


def kernel(fam, th, a, b):
    """(F, 1 - F, f) for a kernel family."""
    if fam == "gb1":
        A, B = th
        return (lambda x: (x / B) ** A), (lambda x: 1 - (x / B) ** A), (lambda x: A / B * (x / B) ** (A - 1))
    if fam == "gb2":
        A, B = th
        return ((lambda x: 1 / (1 + (x / B) ** -A)), (lambda x: 1 / (1 + (x / B) ** A)),
                (lambda x: A / x * (x / B) ** A / (1 + (x / B) ** A) ** 2))
    if fam == "bn":
        m, s = th
        return (lambda x: ncdf((x - m) / s)), (lambda x: ncdf((m - x) / s)), (lambda x: npdf((x - m) / s) / s)
    if fam == "skewt":
        c = a + b
        small = lambda x: c / (2 * sqrt(c + x * x) * (sqrt(c + x * x) + abs(x)))
        return ((lambda x: 1 - small(x) if x > 0 else small(x)), (lambda x: small(x) if x > 0 else 1 - small(x)),
                (lambda x: c / (2 * (c + x * x) ** mpf(1.5))))
    if fam == "logf":
        A, B = th
        return ((lambda x: 1 / (1 + exp(-(x - A) / B))), (lambda x: 1 / (1 + exp((x - A) / B))),
                (lambda x: exp(-(x - A) / B) / (B * (1 + exp(-(x - A) / B)) ** 2)))
    if fam == "be":
        (A,) = th
        return (lambda x: -mp.expm1(-A * x)), (lambda x: exp(-A * x)), (lambda x: A * exp(-A * x))
    if fam == "bw":
        A, B = th
        return ((lambda x: -mp.expm1(-A * x ** B)), (lambda x: exp(-A * x ** B)),
                (lambda x: A * B * x ** (B - 1) * exp(-A * x ** B)))


def dist(fam, params):
    a, b = mpf(params[0]), mpf(params[1])
    th = [mpf(t) for t in params[2:]]
    F, S, f = kernel(fam, th, a, b)
    pdf = lambda x: f(x) * F(x) ** (a - 1) * S(x) ** (b - 1) / beta(a, b)
    cdf = lambda x: betainc(a, b, 0, F(x), regularized=True)
    return pdf, cdf


SUPPORT = {"gb1": None, "gb2": (0, inf), "bn": (-inf, inf), "skewt": (-inf, inf), "logf": (-inf, inf),
           "be": (0, inf), "bw": (0, inf)}

T2003 = {
    "gb1": ["1.955", "2830.689", "0.889", "22685"],
    "gb2": ["0.490", "1.111", "2.724", "8.297"],
    "bn": ["2.348", "0.369", "0.5", "4.012"],
    "skewt": ["7.822", "0.936"],
    "logf": ["3.468", "0.195", "2.256", "2.294"],
    "be": ["1.700", "0.799", "0.257"],
    "bw": ["1.748", "0.875", "0.251", "0.982"],
}

if __name__ == "__main__":
    print("# special functions")
    for x in ["0.5", "1e-5", "3.7", "100.25", "2830.689"]:
        show(f"log_gamma({x})", loggamma(mpf(x)))
    for x in ["0.799", "2.499", "1e-3", "7.5", "50.5", "-0.5"]:
        show(f"digamma({x})", digamma(mpf(x)))
    for a, b in [("0.49", "1.111"), ("1955", "2830"), ("1e-3", "2")]:
        show(f"log_beta({a},{b})", log(beta(mpf(a), mpf(b))))
    for x, a, b in [("0.3", "2", "3"), ("0.5", "0.49", "1.111"), ("0.999", "0.1", "50"), ("1e-5", "1.955", "2830.689"),
                    ("0.55", "200", "300"), ("0.02", "0.3", "0.2")]:
        show(f"I({x};{a},{b})", betainc(mpf(a), mpf(b), 0, mpf(x), regularized=True))
        show(f"1-I({x};{a},{b})", betainc(mpf(b), mpf(a), 0, 1 - mpf(x), regularized=True))
    for p, a, b in [("0.05", "2", "3"), ("1e-10", "0.5", "4"), ("0.999", "1.7", "0.799")]:
        r = findroot(lambda t: betainc(mpf(a), mpf(b), 0, t, regularized=True) - mpf(p), (mpf(0), mpf(1)),
                     solver="anderson", tol=mpf(10) ** -60)
        show(f"I^-1({p};{a},{b})", r)
    for p in ["0.975", "0.3", "1e-10", "1e-300"]:
        with mp.workdps(400):
            z = sqrt(2) * mp.erfinv(2 * mpf(p) - 1)
        show(f"Phi^-1({p})", z)

    print("# means and densities, 2003 parameters")
    for fam, params in T2003.items():
        pdf, cdf = dist(fam, params)
        lo, hi = SUPPORT[fam] if fam != "gb1" else (0, mpf(params[3]))
        if fam == "gb1":
            mean = quad(lambda x: x * pdf(x), [0, 1, 5, 10, 20, 50, 100, hi])
        elif lo == 0:
            mean = quad(lambda x: x * pdf(x), [0, 1, 5, 10, 20, 50, 100, inf])
        else:
            mean = quad(lambda x: x * pdf(x), [-inf, -20, -5, 0, 5, 10, 20, 50, inf])
        show(f"{fam} mean", mean)
        for x in ["0.5", "3", "6.5", "20"]:
            show(f"{fam} pdf({x})", pdf(mpf(x)))
            show(f"{fam} cdf({x})", cdf(mpf(x)))
    for year, p in [("2004", ["1.608", "0.948", "0.209"]), ("2005", ["1.609", "0.950", "0.205"])]:
        a, b, r = (mpf(v) for v in p)
        show(f"be {year} mean", (digamma(a + b) - digamma(b)) / r)
    for year, p in [("2004", ["7.649", "0.894"]), ("2005", ["7.734", "0.885"])]:
        a, b = (mpf(v) for v in p)
        show(f"skewt {year} mean",
             (a - b) * sqrt(a + b) / 2 * mp.gamma(a - mpf(0.5)) * mp.gamma(b - mpf(0.5)) / (mp.gamma(a) * mp.gamma(b)))

    print("# grouped: GB2 2003 on income edges")
    edges = [mpf(0), mpf("2.5"), mpf(5), mpf("7.5"), mpf(10), mpf(15), mpf(20), mpf(25)]
    counts = [2100, 2750, 2100, 1270, 1100, 370, 150, 160]
    pdf, cdf = dist("gb2", T2003["gb2"])
    cum = [mpf(0)] + [cdf(e) for e in edges[1:]] + [mpf(1)]
    probs = [cum[i + 1] - cum[i] for i in range(len(counts))]
    for i, pr in enumerate(probs):
        show(f"P[{i}]", pr)
    show("loglik", sum(n * log(pr) for n, pr in zip(counts, probs)))
