"""DualGraphLens tests"""
