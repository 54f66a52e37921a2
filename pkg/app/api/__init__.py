"""
Run surface: config models, derivator files, presets, output writers and the runner.
"""
