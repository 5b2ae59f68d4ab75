"""Regenerate the bundled benchmark fixtures in src/gpensemble/data/.

The public benchmark files are not redistributed here. Each fixture is a
synthetic regression problem with the same number of features and rows
as the corresponding benchmark, feature ranges close to the originals and
a noisy nonlinear target, so that every code path (and the relative
behaviour of the pruning methods) can be exercised offline. Drop the real
CSVs in their place to reproduce the original setting.

    python tools/make_fixtures.py
"""

from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / 'src' / 'gpensemble' / 'data'


def airfoil(rng, n=1502):
    freq = rng.choice([200, 250, 315, 400, 500, 630, 800, 1000, 1250, 1600,
                       2000, 2500, 3150, 4000, 5000, 6300, 8000, 10000,
                       12500, 16000, 20000], size=n).astype(float)
    angle = np.round(rng.uniform(0, 22.2, n), 1)
    chord = rng.choice([0.0254, 0.0508, 0.1016, 0.1524, 0.2286, 0.3048], n)
    velocity = rng.choice([31.7, 39.6, 55.5, 71.3], n)
    thickness = np.round(np.exp(rng.uniform(np.log(4e-4), np.log(0.058), n)), 6)
    lf = np.log10(freq)
    target = (132.0 - 2.5 * (lf - 3.2) ** 2 * 4 - 60 * thickness
              - 14 * chord + 0.08 * velocity - 0.25 * angle
              + 0.02 * angle * lf * 2 + rng.normal(0, 2.0, n))
    return np.column_stack([freq, angle, chord, velocity, thickness, target])


def concrete(rng, n=1029):
    cement = rng.uniform(102, 540, n)
    slag = np.where(rng.random(n) < 0.45, 0, rng.uniform(11, 359, n))
    ash = np.where(rng.random(n) < 0.55, 0, rng.uniform(24, 200, n))
    water = rng.uniform(122, 247, n)
    plast = np.where(rng.random(n) < 0.37, 0, rng.uniform(1.7, 32, n))
    coarse = rng.uniform(801, 1145, n)
    fine = rng.uniform(594, 993, n)
    age = rng.choice([1, 3, 7, 14, 28, 56, 90, 180, 365], n).astype(float)
    binder = cement + 0.6 * slag + 0.3 * ash
    target = (28 * (binder / water - 0.9) * np.log1p(age) / np.log(29)
              + 0.25 * plast + rng.normal(0, 4.0, n))
    target = np.clip(target, 2.3, 82.6)
    return np.column_stack([cement, slag, ash, water, plast, coarse, fine,
                            age, target])


def ppb(rng, n=131, d=626):
    X = rng.normal(0, 1, (n, d))
    # a few correlated descriptor blocks
    X[:, 1::7] += 0.6 * X[:, ::7][:, :X[:, 1::7].shape[1]]
    w = np.zeros(d)
    w[[3, 17, 42, 101, 250]] = [9.0, -6.0, 5.0, 4.0, -3.0]
    target = 60 + X @ w + 3 * X[:, 3] * X[:, 42] + rng.normal(0, 8.0, n)
    return np.column_stack([X, np.clip(target, 0.5, 99.9)])


def slump(rng, n=102):
    cement = rng.uniform(137, 374, n)
    slag = rng.uniform(0, 193, n)
    ash = rng.uniform(0, 260, n)
    water = rng.uniform(160, 240, n)
    sp = rng.uniform(4.4, 19, n)
    coarse = rng.uniform(708, 1050, n)
    fine = rng.uniform(640, 902, n)
    slump_cm = rng.uniform(0, 29, n)
    flow = 20 + 1.8 * slump_cm + rng.normal(0, 6, n)
    target = (0.12 * cement + 0.03 * slag + 0.06 * ash - 0.1 * water
              - 0.05 * sp + 0.004 * coarse + 0.002 * fine
              + rng.normal(0, 2.5, n))
    return np.column_stack([cement, slag, ash, water, sp, coarse, fine,
                            slump_cm, flow, target])


def yacht(rng, n=307):
    lcb = rng.choice([-5.0, -2.3, -2.4, -2.2, 0.0], n)
    cp = rng.choice([0.53, 0.546, 0.565, 0.568, 0.574, 0.6], n)
    ld = rng.uniform(4.34, 5.14, n).round(2)
    bd = rng.uniform(2.81, 5.35, n).round(2)
    lb = rng.uniform(2.73, 3.64, n).round(2)
    fr = rng.choice(np.round(np.linspace(0.125, 0.45, 14), 3), n)
    target = (0.02 + 5000 * fr ** 6 * (1 + 0.4 * (cp - 0.56) / 0.07)
              * (5.5 - ld) * (1 + 0.05 * lcb) + 0.3 * (bd - 4) * fr
              + rng.normal(0, 0.6, n))
    return np.column_stack([lcb, cp, ld, bd, lb, fr,
                            np.clip(target, 0.01, None)])


BUILDERS = {'airfoil': airfoil, 'concrete': concrete, 'ppb': ppb,
            'slump': slump, 'yacht': yacht}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for seed, (name, build) in enumerate(BUILDERS.items()):
        data = build(np.random.default_rng(20180000 + seed))
        d = data.shape[1] - 1
        header = ','.join(['x%d' % i for i in range(d)] + ['y'])
        np.savetxt(OUT / ('%s.csv' % name), data, delimiter=',',
                   header=header, comments='', fmt='%.10g')
        print(name, data.shape)


if __name__ == '__main__':
    main()
