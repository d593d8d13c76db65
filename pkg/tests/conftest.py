import os

from hypothesis import HealthCheck, settings

# Fixed derandomized profile so reruns see the same examples.
settings.register_profile(
    "repo",
    derandomize=True,
    database=None,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large, HealthCheck.filter_too_much],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

CORPUS = os.path.join(os.path.dirname(__file__), "corpus")
