//! Python/matplotlib scripts rendering the CSV outputs.

pub fn profile_script(m: f64, p: f64, n: u32, k_const: f64, xi0: Option<f64>, k_hardy: f64) -> String {
    let c = k_hardy * (m - p) / (m * (n as f64 - 2.0));
    let amp = ((m - 1.0) / (4.0 * m)).powf(1.0 / (m - 1.0));
    let edge = xi0.map_or("None".to_string(), |x| format!("{x:e}"));
    format!(
        r#"# Profile f(xi) with the origin and interface asymptotics.
import csv
import math
import matplotlib.pyplot as plt

m, p, N = {m:e}, {p:e}, {n}
K, c, xi0, A = {k_const:e}, {c:e}, {edge}, {amp:e}
rows = [tuple(map(float, r)) for r in list(csv.reader(open("profile.csv")))[1:]]
xi = [r[0] for r in rows if r[0] > 0]
f = [r[1] for r in rows if r[0] > 0]

fig, ax = plt.subplots(1, 2, figsize=(11, 4))
ax[0].plot(xi, f, label="profile")
near = [x for x in xi if K - c * math.log(x) > 0 and x < 0.5 * (xi0 or 1.0)]
ax[0].plot(near, [(K - c * math.log(x)) ** (1 / (m - p)) for x in near], "--", label="(K - c ln xi)^(1/(m-p))")
if xi0:
    edge = [x for x in xi if 0.8 * xi0 < x < xi0]
    ax[0].plot(edge, [A * (xi0**2 - x**2) ** (1 / (m - 1)) for x in edge], ":", label="A (xi0^2 - xi^2)^(1/(m-1))")
ax[0].set_xlabel("xi")
ax[0].set_ylabel("f")
ax[0].legend()
ax[1].semilogx(xi, [v ** (m - p) for v in f], label="f^(m-p)")
ax[1].semilogx(xi, [K - c * math.log(x) for x in xi], "--", label="K - c ln xi")
ax[1].set_xlabel("xi")
ax[1].legend()
fig.tight_layout()
fig.savefig("profile.png", dpi=150)
"#
    )
}

pub fn phase_script() -> String {
    r#"# (X, Y) and (X, Z) projections of the traced orbits.
import csv
from collections import defaultdict
import matplotlib.pyplot as plt

orbits = defaultdict(list)
for r in list(csv.reader(open("orbits.csv")))[1:]:
    orbits[int(float(r[0]))].append(tuple(map(float, r[1:])))

fig, ax = plt.subplots(1, 2, figsize=(11, 4))
for k, pts in sorted(orbits.items()):
    ax[0].plot([q[1] for q in pts], [q[2] for q in pts], label=f"orbit {k}")
    ax[1].plot([q[1] for q in pts], [q[3] for q in pts])
ax[0].plot([0, 0], [0, -0.5], "ko")
ax[0].set_xlabel("X")
ax[0].set_ylabel("Y")
ax[1].set_xlabel("X")
ax[1].set_ylabel("Z")
ax[0].legend()
fig.tight_layout()
fig.savefig("phase.png", dpi=150)
"#
    .to_string()
}

pub fn pde_script(files: &[(f64, String)]) -> String {
    let list: Vec<String> = files.iter().map(|(e, f)| format!("({e:e}, \"{f}\")")).collect();
    format!(
        r#"# Snapshots u(r, t) of the regularized evolutions, one panel per eps.
import csv
from collections import defaultdict
import matplotlib.pyplot as plt

runs = [{}]
fig, axes = plt.subplots(1, len(runs), figsize=(5 * len(runs), 4), squeeze=False)
for ax, (eps, name) in zip(axes[0], runs):
    snaps = defaultdict(list)
    for r in list(csv.reader(open(name)))[1:]:
        t, rr, u = map(float, r)
        snaps[t].append((rr, u))
    for t, pts in sorted(snaps.items()):
        ax.plot([q[0] for q in pts], [q[1] for q in pts], lw=0.8)
    ax.set_title(f"eps = {{eps}}")
    ax.set_xlabel("r")
    ax.set_ylabel("u")
fig.tight_layout()
fig.savefig("snapshots.png", dpi=150)
"#,
        list.join(", ")
    )
}
