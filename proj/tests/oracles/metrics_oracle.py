"""Direct-formula reconstruction metrics for a fixed pair of 3x4 grids."""
import numpy as np

truth = np.array([[0.0, 1.0, 2.0, 3.0], [1.5, -0.5, 0.25, 2.5], [4.0, 3.5, -1.0, 0.75]])
est = np.array([[0.1, 0.9, 2.3, 2.9], [1.4, -0.2, 0.25, 2.7], [3.6, 3.55, -0.9, 0.7]])
err = est - truth
rng = truth.max() - truth.min()
rmse = np.sqrt((err ** 2).mean())
mae = np.abs(err).mean()
r2 = 1 - (err ** 2).sum() / ((truth - truth.mean()) ** 2).sum()
pearson = np.corrcoef(est.ravel(), truth.ravel())[0, 1]
acr = 100 * (np.abs(err) <= 0.05 * rng).mean()
print("rmse %.17g\nmae %.17g\nr2 %.17g\npearson %.17g\nacr %.17g\nrmse_pct %.17g" % (
    rmse, mae, r2, pearson, acr, 100 * rmse / rng))
