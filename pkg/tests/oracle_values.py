"""Reference constants computed with mpmath at 40 significant digits.

Regenerate with ``python tests/oracle_values.py``; the frozen table below is
what the tests compare against, so a change in the library cannot move both
sides at once.
"""

SQRT_PI_OVER_2_SQRT_5000 = 0.012533141373155002512
Z_975 = 1.9599639845400542355

# rho -> {name: value}
VARIANCES = {
    1.0: {
        "sigma2": 3.1220534715084116968,
        "moment": 4.8,
        "v1": 2.0,
        "v2": 24.0,
        "v3": 4.0,
        "v4": 4.0,
        "v5": 0.53333333333333333333,
    },
    2.0: {
        "sigma2": 48.524429701993688833,
        "moment": 28.8,
        "v1": 2.9142135623730950488,
        "v2": 296.99242404917498012,
        "v3": 16.985281374238570293,
        "v4": 2.25,
        "v5": 8.4,
    },
    3.0: {
        "sigma2": 248.67299329345561825,
        "moment": 102.85714285714285714,
        "v1": 3.2893083012186869074,
        "v2": 1361.9882525083576802,
        "v3": 38.643668153778543646,
        "v4": 1.7777777777777777778,
        "v5": 45.257142857142857143,
    },
}


def mp_variances(rho):
    """Evaluate every variance in arbitrary precision; used to regenerate the table."""
    import mpmath as mp

    mp.mp.dps = 40
    r = mp.mpf(rho)
    a = mp.power(2, -1 / r) - 1
    brace = 4 - 8 * (2 + r) / (3 + r) + (11 + 5 * r) * (2 + r) / ((3 + r) * (4 + r))
    return {
        "sigma2": r**2 * (mp.power(2, 1 - 2 / r) + 1) / (a * mp.log(4)) ** 2,
        "moment": r * (2 + r) * (1 + r) ** 2 * brace,
        "v1": mp.power(2, 1 - 2 / r) / (r**2 * a**2),
        "v2": 3 * mp.power(2, -1 - 2 / r) / (r**2 * a**6),
        "v3": mp.power(2, -2 / r) / (r**2 * a**4),
        "v4": (1 + 1 / r) ** 2,
        "v5": r**2 * (r / (2 + r) + r * (2 + r) * brace - 4 * r / (3 + r)),
    }


if __name__ == "__main__":
    import mpmath as mp

    for rho in VARIANCES:
        for name, v in mp_variances(rho).items():
            print(rho, name, mp.nstr(v, 20))
    print("bias", mp.nstr(mp.sqrt(mp.pi) / (2 * mp.sqrt(5000)), 20))
    print("z", mp.nstr(mp.sqrt(2) * mp.erfinv(mp.mpf("0.95")), 20))
