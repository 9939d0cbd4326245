"""Desk-scale workbench for inferential logics: categoricity of rule sets,
omega-rule refutations, types and atomicity, and Morley-coded two-sorted
theories."""

__version__ = "0.1.0"
