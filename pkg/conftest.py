import hypothesis

pytest_plugins = [
    "tests.fixtures.grids",
    "tests.fixtures.states",
]

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile(
    "thorough", max_examples=200, deadline=None
)
hypothesis.settings.load_profile("fast")
