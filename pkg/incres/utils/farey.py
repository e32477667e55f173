'''
Walking the Farey sequence of order n over an interval of the positive reals.
'''

from fractions import Fraction


def farey_bracket(x, n):
    '''
    Stern-Brocot descent towards x. Returns the adjacent pair (a, b), (c, d)
    of fractions with denominators <= n such that a/b <= x < c/d.
    '''
    x = Fraction(x)
    a, b, c, d = 0, 1, 1, 0
    while True:
        num, den = a + c, b + d
        if den > n:
            return (a, b), (c, d)
        # mediant at or below x moves the left end
        if num <= x * den:
            a, b = num, den
        else:
            c, d = num, den


def farey_walk(lo, hi, n):
    '''Yields every fraction p/q in [lo, hi] with q <= n in increasing order.'''
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        return
    (a, b), (c, d) = farey_bracket(lo, n)
    if Fraction(a, b) == lo:
        yield Fraction(a, b)
    while d != 0 and c <= hi * d:
        yield Fraction(c, d)
        k = (n + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
