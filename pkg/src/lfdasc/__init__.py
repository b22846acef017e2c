"""Depth-of-field aware scene complexity for light field displays.

Submodules follow the processing chain: ``display_model`` and ``lightfield``
describe geometry and data, ``dof_render`` blurs light fields, ``scene_maps``,
``geometric_factors``, ``position_factors`` and ``dasc`` score scenes,
``characterize`` summarises datasets, ``study_analysis`` and ``predictor``
turn pairwise preference votes into a radius model, and ``cli`` wires it up.
"""

__version__ = "0.1.0"
