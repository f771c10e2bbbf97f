"""Independent reference computations used to freeze expected values.

Nothing here imports the package's physics; units are converted locally.
"""

import math

G = 32.174
MPH = 5280.0 / 3600.0


def verlet_rim_crossing(x0, z0, v_mph, theta_deg, z_level=10.0, dt=1e-5, g=G):
    """Step the flight with velocity Verlet and interpolate the downward crossing of z_level.

    Returns (t, x) or None if the ball never comes down through the level.
    """
    th = math.radians(theta_deg)
    vx = -v_mph * MPH * math.cos(th)
    vz = v_mph * MPH * math.sin(th)
    t, x, z = 0.0, x0, z0
    while z >= 0:
        # constant acceleration: Verlet is exact up to rounding
        nx = x + vx * dt
        nz = z + vz * dt - 0.5 * g * dt * dt
        nvz = vz - g * dt
        if z >= z_level > nz and nvz < 0:
            w = (z - z_level) / (z - nz)
            return t + w * dt, x + w * (nx - x)
        t, x, z, vz = t + dt, nx, nz, nvz
    return None


def brute_force_landing(x0, z0, v_mph, theta_deg, z_level=10.0, g=G, n=200_000):
    """Bisection on the descending branch of z(t) = z_level; no quadratic formula."""
    th = math.radians(theta_deg)
    vx = v_mph * MPH * math.cos(th)
    vz = v_mph * MPH * math.sin(th)
    t_apex = vz / g
    z_apex = z0 + vz * t_apex - 0.5 * g * t_apex**2
    if z_apex < z_level:
        return None
    lo, hi = t_apex, t_apex + 10.0
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        if z0 + vz * mid - 0.5 * g * mid * mid >= z_level:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    t = 0.5 * (lo + hi)
    return t, x0 - vx * t


def flood_fill_components(mask):
    """Number of 4-connected True components in a list-of-lists mask."""
    rows, cols = len(mask), len(mask[0])
    seen = [[False] * cols for _ in range(rows)]
    count = 0
    for i in range(rows):
        for j in range(cols):
            if mask[i][j] and not seen[i][j]:
                count += 1
                stack = [(i, j)]
                seen[i][j] = True
                while stack:
                    a, b = stack.pop()
                    for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                        na, nb = a + da, b + db
                        if 0 <= na < rows and 0 <= nb < cols and mask[na][nb] and not seen[na][nb]:
                            seen[na][nb] = True
                            stack.append((na, nb))
    return count
