import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.filter_too_much],
)
settings.load_profile("default")


@st.composite
def ball_vector(draw, dim=None, max_dim=4, max_norm=0.95):
    """Coordinate vector strictly inside the ball of radius max_norm."""
    n = dim if dim is not None else draw(st.integers(1, max_dim))
    comps = draw(
        st.lists(
            st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False),
            min_size=n,
            max_size=n,
        )
    )
    v = np.asarray(comps, dtype=float)
    nr = float(np.linalg.norm(v))
    if nr >= max_norm:
        v = v * (draw(st.floats(0.0, 0.999)) * max_norm / (nr + 1e-300))
    return v


@st.composite
def ball_pair(draw, max_dim=4, max_norm=0.95):
    """Two vectors of equal dimension inside the ball of radius max_norm."""
    n = draw(st.integers(1, max_dim))
    return draw(ball_vector(dim=n, max_norm=max_norm)), draw(
        ball_vector(dim=n, max_norm=max_norm)
    )


@st.composite
def unit_vector(draw, dim=None, max_dim=4):
    n = dim if dim is not None else draw(st.integers(2, max_dim))
    comps = draw(
        st.lists(
            st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False),
            min_size=n,
            max_size=n,
        ).filter(lambda c: 1e-3 < float(np.linalg.norm(c)) )
    )
    v = np.asarray(comps, dtype=float)
    return v / float(np.linalg.norm(v))
