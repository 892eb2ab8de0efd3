"""Conjugates and infimal convolution.

A max-affine function and a point hull are the same object seen from the two
sides of the Legendre transform, so conjugating twice gives back the very
same floats. Quadratics compose in closed form; mixed pairs fall back to a
numerical closure.
"""

import numpy as np

from fdm import MaxAffine, Quadratic, inf_convolution, right_scalar_mult

f = MaxAffine([[-1.0], [0.5], [2.0]], [0.0, -0.3, 1.0])
print("f       :", f)
print("f*      :", f.conjugate())
back = f.conjugate().conjugate()
print("f** == f:", np.array_equal(back.slopes, f.slopes) and np.array_equal(back.intercepts, f.intercepts))

# x^2/2 □ x^2 is x^2/3: inverse Hessians add
h = inf_convolution(Quadratic(1.0), Quadratic(2.0))
print("\nx^2/2 □ x^2 at x=1.5:", h(np.array([[1.5]]))[0], "(expected 0.75)")

# |x| □ x^2/2 is the Huber function
huber = inf_convolution(MaxAffine([-1.0, 1.0], [0.0, 0.0]), Quadratic(1.0))
xs = np.array([-3.0, -1.0, -0.5, 0.0, 0.5, 2.0])
print("huber   :", (np.round(huber(xs[:, None]), 6) + 0.0).tolist())

# (φt)(x) = t φ(x/t) scales the conjugate by t
phi = Quadratic(1.0)
print("(φ 3)(2):", right_scalar_mult(phi, 3.0)(np.array([[2.0]]))[0], "(expected 2/3)")
