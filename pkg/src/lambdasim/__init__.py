"""Dynamic routing and wavelength assignment simulator for WDM optical networks."""

from lambdasim.metrics import MetricsAccumulator, ResultRow, erlang_b
from lambdasim.routing import (
    Path,
    RoutingTable,
    adaptive_route,
    build_routing_tables,
    k_shortest_paths,
    link_disjoint_paths,
    shortest_path,
)
from lambdasim.rwa import (
    Accepted,
    BlockReason,
    Blocked,
    ConnectionRequest,
    Lightpath,
    Provisioning,
    admit_adaptive,
    admit_multipath,
    admit_sequential,
    oracle_feasible,
    release,
)
from lambdasim.simulation import ScenarioConfig, generate_workload, run_scenario
from lambdasim.state import ChannelError, NetworkState
from lambdasim.topology import (
    Link,
    Topology,
    TopologyError,
    builtin_topology,
    load_topology,
    new_network_state,
    render_topology,
)
from lambdasim.wavelength import Policy, assign_wavelength, path_availability, update_usage

__version__ = "0.1.0"
