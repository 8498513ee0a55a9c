"""
Curvature-constrained A* over (cell, trailing window) states.

A cell may hold several open paths, one per distinct trailing window of move
directions, because the admissibility of the next move and the curvature cost
depend only on that window. Dominance per state replaces batching of "similar
paths" that end in the same cells.
"""
import enum
import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Optional

from .costs import KappaAccumulation, cost_to_come, cost_to_go, path_objective, total_cost
from .exceptions import Exhausted, IterationLimitExceeded, NoPath
from .hexgrid import HexCell, neighbor
from .primitives import INADMISSIBLE, path_moves, path_turns, turn_between

logger = logging.getLogger(__name__)


class TerminationMode(str, enum.Enum):
    OPTIMAL = 'optimal'
    FIRST_ARRIVAL = 'first_arrival'

    @classmethod
    def _missing_(cls, value):
        # 'paper' is kept as an alias of first_arrival
        if value == 'paper':
            return cls.FIRST_ARRIVAL
        return None


MODE_CHOICES = ('optimal', 'first_arrival', 'paper')


@dataclass(frozen=True)
class SearchConfig:
    mode: TerminationMode = TerminationMode.OPTIMAL
    kappa_accumulation: KappaAccumulation = KappaAccumulation.ACCUMULATED
    prune_dead_cells: bool = True
    initial_heading: Optional[int] = None
    trace: bool = False
    iteration_factor: int = 10

    def __post_init__(self):
        object.__setattr__(self, 'mode', TerminationMode(self.mode))
        object.__setattr__(self, 'kappa_accumulation', KappaAccumulation(self.kappa_accumulation))
        if self.initial_heading is not None and self.initial_heading not in range(6):
            raise ValueError('initial_heading must be a direction index 0..5')

    def as_dict(self):
        return {
            'mode': self.mode.value,
            'kappa_accumulation': self.kappa_accumulation.value,
            'prune_dead_cells': self.prune_dead_cells,
            'initial_heading': self.initial_heading,
        }


@dataclass(frozen=True)
class SearchState:
    cell: HexCell
    window: tuple

    def as_list(self):
        return [self.cell.q, self.cell.r, list(self.window)]


@dataclass(frozen=True, eq=False)
class PathCandidate:
    state: SearchState
    parent: Optional['PathCandidate']
    n_c_star: int
    accumulated_kappa: float
    turns: tuple
    primitive: Optional[int]
    mirrored: bool
    c_c: float
    c_g: float

    @property
    def c(self):
        return self.c_c + self.c_g

    @property
    def cell(self):
        return self.state.cell

    def sort_key(self):
        return (self.c, self.n_c_star, tuple(self.state.cell), self.state.window)

    def cells(self):
        chain = []
        node = self
        while node is not None:
            chain.append(node.state.cell)
            node = node.parent
        chain.reverse()
        return chain

    def window_ids(self):
        ids = []
        node = self
        while node is not None and node.primitive is not None:
            ids.append((node.primitive, node.mirrored))
            node = node.parent
        ids.reverse()
        return ids


@dataclass
class SearchTrace:
    """Iteration log for rendering search snapshots."""
    steps: list = field(default_factory=list)
    open_cells: list = field(default_factory=list)
    closed_cells: list = field(default_factory=list)

    def record(self, iteration, closed, opened, dead):
        self.steps.append({
            'iteration': iteration,
            'closed': closed.state.as_list(),
            'opened': [
                [list(child.parent.cell), list(child.cell), list(child.state.window)] for child in opened
            ],
            'dead': [[list(closed.cell), list(cell)] for cell in dead],
        })

    def to_document(self):
        return {
            'steps': self.steps,
            'open_cells': [list(c) for c in self.open_cells],
            'closed_cells': [list(c) for c in self.closed_cells],
        }

    @classmethod
    def from_document(cls, document):
        return cls(
            steps=list(document.get('steps', [])),
            open_cells=[HexCell(*c) for c in document.get('open_cells', [])],
            closed_cells=[HexCell(*c) for c in document.get('closed_cells', [])],
        )


class SearchLedger:
    def __init__(self):
        self.open = []
        self.best_cost = {}
        self.closed = set()
        self.dead = set()
        self.iterations = 0
        self.expansions = 0
        self.generated = 0
        self.dominated = 0
        self.peak_open = 0
        self._counter = itertools.count()

    def __len__(self):
        return len(self.open)

    def push(self, candidate):
        state = candidate.state
        best = self.best_cost.get(state)
        if state in self.closed or (best is not None and best <= candidate.c_c):
            self.dominated += 1
            return False
        self.best_cost[state] = candidate.c_c
        heapq.heappush(self.open, (*candidate.sort_key(), next(self._counter), candidate))
        self.generated += 1
        self.peak_open = max(self.peak_open, len(self.open))
        return True

    def statistics(self):
        return {
            'iterations': self.iterations,
            'expansions': self.expansions,
            'generated': self.generated,
            'dominated': self.dominated,
            'peak_open': self.peak_open,
            'dead_cells': len(self.dead),
        }


@dataclass
class PlanResult:
    cells: list
    window_ids: list
    objective: object
    statistics: dict
    trace: Optional[SearchTrace] = None

    @property
    def primitive_ids(self):
        return [pid for pid, _ in self.window_ids]

    def to_document(self):
        return {
            'cells': [list(c) for c in self.cells],
            'primitives': [
                {'window': i, 'id': pid, 'mirrored': mirrored}
                for i, (pid, mirrored) in enumerate(self.window_ids)
            ],
            'cost': self.objective.as_dict(),
            'statistics': self.statistics,
        }


def start_candidate(grid, table, weights, config):
    c_c = cost_to_come(1, None, table, weights, config.kappa_accumulation, 0.0)
    return PathCandidate(
        state=SearchState(grid.start, ()),
        parent=None,
        n_c_star=1,
        accumulated_kappa=0.0,
        turns=(),
        primitive=None,
        mirrored=False,
        c_c=c_c,
        c_g=cost_to_go(grid.start, grid.target, grid.spec),
    )


def mark_dead(cell, ledger, grid):
    if cell == grid.target:
        return False
    if cell in ledger.dead:
        return True
    if len(grid.free_neighbors(cell)) <= 1:
        ledger.dead.add(cell)
        return True
    return False


def expand(candidate, grid, catalog, table, weights, config=SearchConfig(), ledger=None, dead_found=None):
    """Children of ``candidate``.

    With a ledger, children whose state is already closed are dropped; every
    ancestor is closed, so no child repeats a state of its own ancestor chain.
    """
    cell, window = candidate.state.cell, candidate.state.window
    k = catalog.window_turns
    children = []
    for d in range(6):
        if candidate.parent is None and config.initial_heading is not None and d != config.initial_heading:
            continue
        nxt = neighbor(cell, d)
        if not grid.is_free(nxt):
            continue
        if window:
            turn = turn_between(window[-1], d)
            if turn is INADMISSIBLE:
                continue
            turns = (candidate.turns + (turn,))[-k:]
            if not catalog.admits(turns):
                continue
        else:
            turns = ()
        state = SearchState(nxt, (window + (d,))[-(k + 1):])
        if ledger is not None:
            if state in ledger.closed:
                continue
            if config.prune_dead_cells and mark_dead(nxt, ledger, grid):
                if dead_found is not None:
                    dead_found.append(nxt)
                continue

        n = candidate.n_c_star + 1
        primitive, mirrored = (None, False)
        if n >= catalog.window_cells:
            primitive, mirrored = catalog.classify(turns)
        c_c = cost_to_come(n, primitive, table, weights, config.kappa_accumulation, candidate.accumulated_kappa)
        children.append(PathCandidate(
            state=state,
            parent=candidate,
            n_c_star=n,
            accumulated_kappa=candidate.accumulated_kappa + (table[primitive] if primitive else 0.0),
            turns=turns,
            primitive=primitive,
            mirrored=mirrored,
            c_c=c_c,
            c_g=cost_to_go(nxt, grid.target, grid.spec),
        ))
    return children


def select_and_close(ledger):
    while ledger.open:
        *_, candidate = heapq.heappop(ledger.open)
        state = candidate.state
        if state in ledger.closed or state.cell in ledger.dead:
            continue
        if ledger.best_cost.get(state, candidate.c_c) < candidate.c_c:
            continue
        ledger.closed.add(state)
        ledger.iterations += 1
        return candidate
    raise Exhausted('open list is empty')


def iteration_cap(grid, catalog, factor):
    return factor * max(1, len(grid.free_cells())) * len(catalog.expanded_signatures) + 1000


def _finish(candidate, table, weights, config, ledger, started, trace):
    cells = candidate.cells()
    window_ids = candidate.window_ids()
    objective = path_objective(
        [pid for pid, _ in window_ids], len(cells), table, weights, config.kappa_accumulation
    )
    stats = ledger.statistics()
    stats['elapsed'] = time.perf_counter() - started
    if trace is not None:
        trace.open_cells = sorted({entry[-1].cell for entry in ledger.open if entry[-1].state not in ledger.closed})
        trace.closed_cells = sorted({state.cell for state in ledger.closed})
    logger.info(
        'plan %s -> %s: %d cells, objective %.6f, %d iterations, peak open %d',
        cells[0].label, cells[-1].label, len(cells), objective.c, stats['iterations'], stats['peak_open'],
    )
    return PlanResult(cells=cells, window_ids=window_ids, objective=objective, statistics=stats, trace=trace)


def plan(grid, catalog, table, weights, config=SearchConfig()):
    catalog.check_ratio(grid.spec)
    if weights.w_n < 1:
        logger.warning('w_n = %s < 1: the distance heuristic may overestimate, optimality is not guaranteed',
                       weights.w_n)
    started = time.perf_counter()
    ledger = SearchLedger()
    trace = SearchTrace() if config.trace else None

    start = start_candidate(grid, table, weights, config)
    if grid.start == grid.target:
        return _finish(start, table, weights, config, ledger, started, trace)

    ledger.push(start)
    cap = iteration_cap(grid, catalog, config.iteration_factor)
    while True:
        try:
            current = select_and_close(ledger)
        except Exhausted:
            raise NoPath(statistics=ledger.statistics()) from None
        if current.cell == grid.target:
            return _finish(current, table, weights, config, ledger, started, trace)
        if ledger.iterations > cap:
            raise IterationLimitExceeded(f"search exceeded {cap} iterations")

        dead_found = []
        children = expand(current, grid, catalog, table, weights, config, ledger, dead_found)
        ledger.expansions += 1
        opened = [child for child in children if ledger.push(child)]
        if trace is not None:
            trace.record(ledger.iterations, current, opened, dead_found)
        if ledger.iterations % 1000 == 0:
            logger.debug('iteration %d: open %d, closed %d', ledger.iterations, len(ledger), len(ledger.closed))

        if config.mode is TerminationMode.FIRST_ARRIVAL:
            arrived = [child for child in children if child.cell == grid.target]
            if arrived:
                best = min(arrived, key=PathCandidate.sort_key)
                return _finish(best, table, weights, config, ledger, started, trace)


def oracle_plan(grid, catalog, table, weights, kappa_accumulation=KappaAccumulation.ACCUMULATED):
    """Exhaustive uniform-cost search over (cell, window) states; no heuristic, no pruning."""
    k = catalog.window_turns
    counter = itertools.count()
    closed = set()
    first = (grid.start, (), (), 0.0)
    heap = [(1 * weights.w_n, 1, next(counter), first, None)]
    while heap:
        c_c, n, _, node, parent = heapq.heappop(heap)
        cell, window, turns, acc = node
        if (cell, window) in closed:
            continue
        closed.add((cell, window))
        chain = (node, parent, n)
        if cell == grid.target:
            cells = []
            link = chain
            while link is not None:
                cells.append(link[0][0])
                link = link[1]
            cells.reverse()
            ids = [catalog.classify(w)[0] for w in _windows(cells, k)]
            objective = path_objective(ids, len(cells), table, weights, kappa_accumulation)
            return objective, cells
        for d in range(6):
            nxt = neighbor(cell, d)
            if not grid.is_free(nxt):
                continue
            new_turns = ()
            if window:
                turn = turn_between(window[-1], d)
                if turn is INADMISSIBLE:
                    continue
                new_turns = (turns + (turn,))[-k:]
                if not catalog.admits(new_turns):
                    continue
            new_window = (window + (d,))[-(k + 1):]
            if (nxt, new_window) in closed:
                continue
            primitive = catalog.classify(new_turns)[0] if n + 1 >= catalog.window_cells else None
            cost = cost_to_come(n + 1, primitive, table, weights, kappa_accumulation, acc)
            new_acc = acc + (table[primitive] if primitive else 0.0)
            heapq.heappush(heap, (cost, n + 1, next(counter), (nxt, new_window, new_turns, new_acc), chain))
    raise NoPath('oracle exhausted the state space')


def _windows(cells, k):
    turns = path_turns(cells)
    return [tuple(turns[i:i + k]) for i in range(len(turns) - k + 1)]


def verify_path(cells, grid, catalog):
    """Raise AssertionError unless ``cells`` is a free, connected, admissible path."""
    assert cells[0] == grid.start and cells[-1] == grid.target, 'path endpoints do not match the map'
    assert all(grid.is_free(c) for c in cells), 'path crosses an occupied cell'
    path_moves(cells)
    turns = path_turns(cells)
    assert INADMISSIBLE not in turns, 'path contains a reversal or a sharp turn'
    k = catalog.window_turns
    for i in range(len(turns)):
        assert catalog.admits(tuple(turns[max(0, i - k + 1):i + 1])), f"turn window ending at {i} is inadmissible"
    return True
