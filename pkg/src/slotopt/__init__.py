"""Delivery time slot availability for attended home delivery.

Three answers to "which windows can this customer still be offered": Simple
Insertion, an exact per-tour TSPTW feasibility search and the ANS local search
that relocates existing orders to make room.
"""

from .ans import AnsConfig, ans_insert, solve_sop_ans
from .booking import fill_schedule, optimize_travel_time, snapshot_at_fill
from .instances import GenConfig, generate_instance, probe_customers, window_setup
from .metrics import feasibility_condition, infeasibility_condition, slot_metrics
from .model import (
    Depot, EuclideanTravel, InsertionRange, Location, MatrixTravel, Order, Schedule,
    StructureError, TimeWindow, Tour, WindowSet, check_insertion_feasible,
    compute_arrival_profile, empty_schedule, insertion_range, is_schedule_feasible,
    is_tour_feasible,
)
from .simple import SlotQuery, SlotResult, solve_sop_simple
from .tsptw import TsptwInstance, solve_sop_tsptw, tsptw_feasible

__version__ = "0.1.0"
