"""Subcomandos da CLI: suite, eval e measure"""
