'''
Dormand-Prince 5(4) embedded pair with PI step-size control.

Coefficients from Hairer, Norsett & Wanner, "Solving Ordinary Differential
Equations I", 2nd ed., p. 178. The pair is first-same-as-last: the seventh
stage of an accepted step is the first stage of the next one.
'''

import logging
import math

import numpy as np

from .. import MAX_STEPS, PropagationException

logger = logging.getLogger(__name__)

C = np.array([0.0, 1/5, 3/10, 4/5, 8/9, 1.0, 1.0])

A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1/5, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3/40, 9/40, 0.0, 0.0, 0.0, 0.0],
    [44/45, -56/15, 32/9, 0.0, 0.0, 0.0],
    [19372/6561, -25360/2187, 64448/6561, -212/729, 0.0, 0.0],
    [9017/3168, -355/33, 46732/5247, 49/176, -5103/18656, 0.0],
    [35/384, 0.0, 500/1113, 125/192, -2187/6784, 11/84],
])

B = np.array([35/384, 0.0, 500/1113, 125/192, -2187/6784, 11/84, 0.0])
B_HAT = np.array([5179/57600, 0.0, 7571/16695, 393/640, -92097/339200, 187/2100, 1/40])
E = B - B_HAT

ORDER = 5
# PI controller exponents (Hairer & Wanner, sec. IV.2)
ALPHA = 0.7 / ORDER
BETA = 0.4 / ORDER


class Solution:
    def __init__(self, t, y, steps_taken, steps_rejected):
        self.t = np.asarray(t, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.steps_taken = steps_taken
        self.steps_rejected = steps_rejected


def hermite(t0, y0, f0, t1, y1, f1, t):
    '''Cubic Hermite interpolant between two accepted steps.'''
    h = t1 - t0
    s = (t - t0) / h
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


class DormandPrince54:
    def __init__(self, fun, rtol, atol, relative=None, max_step=math.inf,
                 max_steps=MAX_STEPS, safety=0.9, min_factor=0.2, max_factor=5.0):
        self.fun = fun
        self.rtol = rtol
        self.atol = atol
        # components flagged False (angles) are weighted as if their magnitude were one
        self.relative = None if relative is None else np.asarray(relative, dtype=bool)
        self.max_step = max_step
        self.max_steps = max_steps
        self.safety = safety
        self.min_factor = min_factor
        self.max_factor = max_factor

    def _scale(self, y, y_new):
        magnitude = np.maximum(np.abs(y), np.abs(y_new))
        if self.relative is not None:
            magnitude = np.where(self.relative, magnitude, 1.0)
        return self.atol + self.rtol * magnitude

    def step(self, t, y, f, h):
        '''One trial step. Returns the 5th order solution, its derivative and the error norm.'''
        K = np.empty((7, len(y)))
        K[0] = f
        for stage in range(1, 7):
            dy = h * (A[stage, :stage] @ K[:stage])
            K[stage] = self.fun(t + C[stage] * h, y + dy)
        y_new = y + h * (B[:6] @ K[:6])
        # stage 7 was evaluated at (t + h, y_new): it is the next step's first stage
        f_new = K[6]
        error = h * (E @ K)
        norm = float(np.max(np.abs(error) / self._scale(y, y_new)))
        return y_new, f_new, norm

    def initial_step(self, t0, y0, f0, direction):
        scale = self._scale(y0, y0)
        d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
        d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
        if d0 < 1e-5 or d1 < 1e-5:
            h0 = 1e-6
        else:
            h0 = 0.01 * d0 / d1
        y1 = y0 + direction * h0 * f0
        f1 = self.fun(t0 + direction * h0, y1)
        d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** (1.0 / ORDER)
        return min(100 * h0, h1, self.max_step)

    def integrate(self, t0, y0, t1, t_eval=None, dense=False, fixed_step=None, observer=None):
        '''
        Integrates from t0 to t1.

        Without t_eval every accepted step is recorded. With t_eval the steps
        are clipped to land on each sample time, unless dense is set, in which
        case samples are interpolated between free-running steps. The observer,
        if given, is called with (t, y) after every accepted step.
        '''
        y = np.array(y0, dtype=float)
        t = float(t0)
        t1 = float(t1)
        direction = 1.0 if t1 >= t0 else -1.0

        if t_eval is None:
            targets = []
            record_steps = True
        else:
            targets = sorted((float(s) for s in t_eval), key=lambda s: direction * s)
            for s in targets:
                if direction * (s - t0) < 0 or direction * (s - t1) > 0:
                    raise PropagationException('sample time {} outside [{}, {}]'.format(s, t0, t1))
            record_steps = False

        out_t, out_y = [], []
        pending = 0
        if record_steps:
            out_t.append(t)
            out_y.append(y.copy())
        while pending < len(targets) and targets[pending] == t:
            out_t.append(t)
            out_y.append(y.copy())
            pending += 1

        f = self.fun(t, y)
        if fixed_step is not None:
            h = abs(float(fixed_step))
            if h <= 0:
                raise PropagationException('fixed step must be positive')
        else:
            h = self.initial_step(t, y, f, direction)

        steps_taken = 0
        steps_rejected = 0
        err_prev = 1e-4
        rejected = False

        while direction * (t1 - t) > 0:
            if steps_taken + steps_rejected >= self.max_steps:
                raise PropagationException(
                    'step cap of {} reached at t = {} (h = {})'.format(self.max_steps, t, h))
            h = min(h, self.max_step)
            stop = t1
            if not dense and pending < len(targets):
                stop = targets[pending]
            clipped = direction * (t + direction * h - stop) >= 0
            h_try = (stop - t) if clipped else direction * h

            y_new, f_new, err = self.step(t, y, f, h_try)
            if fixed_step is not None:
                err = 0.0

            if err <= 1.0:
                t_new = stop if clipped else t + h_try
                if dense:
                    while pending < len(targets) and direction * (targets[pending] - t_new) <= 0:
                        s = targets[pending]
                        out_t.append(s)
                        out_y.append(y_new.copy() if s == t_new else hermite(t, y, f, t_new, y_new, f_new, s))
                        pending += 1
                elif record_steps:
                    out_t.append(t_new)
                    out_y.append(y_new.copy())
                elif clipped and pending < len(targets) and t_new == targets[pending]:
                    while pending < len(targets) and targets[pending] == t_new:
                        out_t.append(t_new)
                        out_y.append(y_new.copy())
                        pending += 1

                t, y, f = t_new, y_new, f_new
                steps_taken += 1
                if observer is not None:
                    observer(t, y)

                if fixed_step is None:
                    if err == 0.0:
                        factor = self.max_factor
                    else:
                        factor = self.safety * err ** -ALPHA * err_prev ** BETA
                        factor = min(self.max_factor, max(self.min_factor, factor))
                    if rejected:
                        factor = min(1.0, factor)
                    err_prev = max(err, 1e-4)
                    h_next = abs(h_try) * factor
                    # a step cut short to hit a sample says nothing about the step size
                    h = max(h_next, h) if clipped else h_next
                rejected = False
            else:
                steps_rejected += 1
                rejected = True
                factor = max(self.min_factor, self.safety * err ** (-1.0 / ORDER))
                h = abs(h_try) * factor
                logger.debug('rejected step at t=%r, err=%.3e, retrying with h=%.3e', t, err, h)

            if h < 16 * np.finfo(float).eps * max(abs(t), 1.0):
                raise PropagationException(
                    'step size underflow at t = {}: h = {}, last error norm {}'.format(t, h, err))

        return Solution(out_t, out_y, steps_taken, steps_rejected)
