"""Resource quantifiers built from gauge functions, robustness programs and convex roofs."""
