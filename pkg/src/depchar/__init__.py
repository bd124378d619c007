"""Dependency characterizations over finite relational databases."""
from .algebra import direct_product, enumerate_databases, intersection, m_neighbourhood
from .axiomatizer import (AxiomatizationReport, axiomatize, compute_sigma_vee, eliminate_disjunction,
                          enumerate_dds, enumerate_edds)
from .chase import (ChaseResult, ImplicationVerdict, MarkedDatabase, brute_force_implies, chase_full, decide,
                    find_countermodel, implies_full)
from .diagrams import diagram, holds_in, negate_to_dd, negate_to_edd, relative_diagram, to_formula
from .logic import Atom, Dd, Edd, Egd, Equality, ExistsConj, Tgd, Var, satisfies, satisfies_all
from .model import Database, Fact, RelationSymbol, Schema
from .properties import (Extensional, Intensional, PropertyReport, check_1_criticality,
                         check_closure_intersections, check_closure_products, check_closure_subdatabases,
                         check_domain_independence, check_locality, check_modularity, check_n0_equivalence)
from .syntax import format_database, format_dependency, parse_database, parse_dependencies, parse_dependency

__all__ = [
    "Atom", "AxiomatizationReport", "ChaseResult", "Database", "Dd", "Edd", "Egd", "Equality", "ExistsConj",
    "Extensional", "Fact", "ImplicationVerdict", "Intensional", "MarkedDatabase", "PropertyReport",
    "RelationSymbol", "Schema", "Tgd", "Var", "axiomatize", "brute_force_implies", "chase_full",
    "check_1_criticality", "check_closure_intersections", "check_closure_products",
    "check_closure_subdatabases", "check_domain_independence", "check_locality", "check_modularity",
    "check_n0_equivalence", "compute_sigma_vee", "decide", "diagram", "direct_product",
    "eliminate_disjunction", "enumerate_databases", "enumerate_dds", "enumerate_edds", "find_countermodel",
    "format_database", "format_dependency", "holds_in", "implies_full", "intersection", "m_neighbourhood",
    "negate_to_dd", "negate_to_edd", "parse_database", "parse_dependencies", "parse_dependency",
    "relative_diagram", "satisfies", "satisfies_all", "to_formula",
]
