"""Reference values for E_{nu,1}(x) and its derivative.

Moderate arguments: Taylor series at high working precision.
Large negative arguments: Talbot inversion of z^{nu-1}/(z^nu + c), which is
independent of every route used by the Rust implementation.

Run: python3 mittag_leffler_reference.py > ml_reference.txt
"""
import mpmath as mp


def taylor(nu, x, deriv=False):
    nu = mp.mpf(nu)
    x = mp.mpf(x)
    peak = abs(x) ** (1 / nu)
    mp.mp.dps = int(40 + peak / 2.3)
    s = mp.mpf(0)
    k = 1 if deriv else 0
    while True:
        if deriv:
            term = k * x ** (k - 1) / mp.gamma(k * nu + 1)
        else:
            term = x ** k / mp.gamma(k * nu + 1)
        s += term
        if k > 10 and abs(term) < mp.mpf(10) ** (-40) * abs(s) and k * nu > peak:
            break
        k += 1
    return s


def talbot(nu, x, deriv=False):
    # E_nu(-c t^nu) with t = 1: Laplace image z^{nu-1}/(z^nu + c), c = -x
    mp.mp.dps = 40
    nu = mp.mpf(nu)
    c = -mp.mpf(x)
    if deriv:
        # d/dx E(x) at x = -c: image z^{-1} * z^{2nu}... use E'(x) = E_{nu,nu}(x)/nu
        # L[t^{nu-1} E_{nu,nu}(-c t^nu)] = 1/(z^nu + c); evaluate at t = 1
        f = lambda z: 1 / (z ** nu + c)
        return mp.invertlaplace(f, 1, method="talbot") / nu
    f = lambda z: z ** (nu - 1) / (z ** nu + c)
    return mp.invertlaplace(f, 1, method="talbot")


cases = []
for nu in ["0.1", "0.3", "0.5", "0.7", "0.75", "0.9", "0.99"]:
    for x in ["-5", "-2", "-1", "-0.5", "0.5", "2", "5"]:
        cases.append((nu, x, "taylor"))
    for x in ["-10", "-30", "-100", "-1000", "-10000"]:
        cases.append((nu, x, "talbot"))

for nu, x, how in cases:
    if abs(float(x)) ** (1 / float(nu)) > 600:
        # the Taylor series needs thousands of digits here
        if float(x) > 0:
            continue
        how = "talbot"
    fn = taylor if how == "taylor" else talbot
    v = fn(nu, x)
    d = fn(nu, x, deriv=True)
    print(f"({nu}, {x}, {mp.nstr(v, 20)}, {mp.nstr(d, 20)}),", flush=True)
