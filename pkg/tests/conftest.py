from hypothesis import settings

# fixed example generation: the suite is a deterministic artifact
settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")
