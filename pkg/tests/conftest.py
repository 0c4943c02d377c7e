import hypothesis

# exact arithmetic makes single examples slow; disable the per-example deadline
hypothesis.settings.register_profile("exact", deadline=None, max_examples=25)
hypothesis.settings.load_profile("exact")
