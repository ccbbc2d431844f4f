"""Edge-truncated centered moving average of a unit step, window 5."""
import numpy as np

raw = np.array([0.0] * 5 + [1.0] * 5) + 0.25
base = np.full(10, 0.25)
d = raw - base
out = [d[max(0, k - 2):k + 3].mean() for k in range(len(d))]
print(", ".join("%.17g" % v for v in out))
