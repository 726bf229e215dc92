#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mhcl/address_space.hpp"
#include "mhcl/error.hpp"
#include "mhcl/messages.hpp"
#include "mhcl/simulator.hpp"
#include "mhcl/topology.hpp"

namespace py = pybind11;
using namespace mhcl;

namespace {

SimMode mode_of(const std::string& s) {
  if (s == "greedy") return SimMode::Greedy;
  if (s == "aggregate") return SimMode::Aggregate;
  if (s == "baseline") return SimMode::BaselineStoring;
  throw Error(ErrorCode::InvalidArgument, "mode must be greedy, aggregate or baseline");
}

FailureKind failure_of(const std::string& s) {
  if (s == "none") return FailureKind::None;
  if (s == "tx") return FailureKind::Tx;
  if (s == "rx") return FailureKind::Rx;
  throw Error(ErrorCode::InvalidArgument, "failure must be none, tx or rx");
}

double ms(Duration d) { return static_cast<double>(d.count()) / 1000.0; }

Duration from_ms(double v) { return Duration(static_cast<std::int64_t>(v * 1000.0)); }

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

}  // namespace

PYBIND11_MODULE(mhcl, m) {
  m.doc() = "Hierarchical IPv6 host configuration over a tree: partitions, codec, simulator";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(std::string(to_string(e.code())) + ": " +
                                                                        e.what());
      exc.attr("code") = to_string(e.code());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<AddressRange>(m, "AddressRange")
      .def(py::init<HostAddress, std::uint32_t>(), py::arg("start"), py::arg("length"))
      .def_property_readonly("start", &AddressRange::start)
      .def_property_readonly("length", &AddressRange::length)
      .def_property_readonly("end", &AddressRange::end)
      .def("__contains__", py::overload_cast<HostAddress>(&AddressRange::contains, py::const_))
      .def("__eq__", [](const AddressRange& a, const AddressRange& b) { return a == b; })
      .def("__repr__", &AddressRange::to_string);

  py::class_<ChildRange>(m, "ChildRange")
      .def_readonly("child", &ChildRange::child)
      .def_readonly("range", &ChildRange::range)
      .def("__repr__", [](const ChildRange& c) { return std::to_string(c.child) + ":" + c.range.to_string(); });

  py::class_<PartitionResult>(m, "PartitionResult")
      .def_readonly("own_address", &PartitionResult::own_address)
      .def_readonly("children", &PartitionResult::children)
      .def_readonly("reserve", &PartitionResult::reserve);

  m.def(
      "partition_greedy",
      [](const AddressRange& range, const std::vector<NodeId>& children, double reserve_percent) {
        return partition_greedy(range, children, ReserveFraction::from_percent(reserve_percent));
      },
      "Equal split of a range among children, ascending id, remainder to the reserve.",
      py::arg("range"), py::arg("children"), py::arg("reserve_percent") = 6.25);
  m.def(
      "partition_aggregate",
      [](const AddressRange& range, const std::vector<std::pair<NodeId, std::uint32_t>>& children,
         double reserve_percent) {
        std::vector<ChildWeight> w;
        for (const auto& [id, size] : children) w.push_back({id, size});
        return partition_aggregate(range, w, ReserveFraction::from_percent(reserve_percent));
      },
      "Split proportional to subtree sizes; children is a list of (id, subtree_size).", py::arg("range"),
      py::arg("children"), py::arg("reserve_percent") = 6.25);
  m.def(
      "allocate_delayed",
      [](const AddressRange& reserve, const std::vector<NodeId>& children, double reserve_percent) {
        return allocate_delayed(reserve, children, ReserveFraction::from_percent(reserve_percent));
      },
      py::arg("reserve"), py::arg("children"), py::arg("reserve_percent") = 6.25);

  py::enum_<Direction>(m, "Direction").value("UP", Direction::Up).value("DOWN", Direction::Down);
  py::class_<Dio>(m, "Dio")
      .def(py::init<std::uint16_t, std::uint16_t>(), py::arg("first_address"), py::arg("partition_size"))
      .def_readwrite("first_address", &Dio::first_address)
      .def_readwrite("partition_size", &Dio::partition_size)
      .def("__eq__", [](const Dio& a, const Dio& b) { return a == b; });
  py::class_<DioAck>(m, "DioAck")
      .def(py::init<std::uint16_t>(), py::arg("acked_seq"))
      .def_readwrite("acked_seq", &DioAck::acked_seq)
      .def("__eq__", [](const DioAck& a, const DioAck& b) { return a == b; });
  py::class_<Dao>(m, "Dao")
      .def(py::init<std::uint16_t>(), py::arg("descendant_count"))
      .def_readwrite("descendant_count", &Dao::descendant_count)
      .def("__eq__", [](const Dao& a, const Dao& b) { return a == b; });
  py::class_<DaoAck>(m, "DaoAck")
      .def(py::init<std::uint16_t>(), py::arg("acked_seq"))
      .def_readwrite("acked_seq", &DaoAck::acked_seq)
      .def("__eq__", [](const DaoAck& a, const DaoAck& b) { return a == b; });
  py::class_<AppData>(m, "AppData")
      .def(py::init<std::uint16_t, Direction>(), py::arg("address"), py::arg("direction"))
      .def_readwrite("address", &AppData::address)
      .def_readwrite("direction", &AppData::direction)
      .def("__eq__", [](const AppData& a, const AppData& b) { return a == b; });
  py::class_<RplDao>(m, "RplDao")
      .def(py::init<std::uint16_t>(), py::arg("target"))
      .def_readwrite("target", &RplDao::target)
      .def("__eq__", [](const RplDao& a, const RplDao& b) { return a == b; });

  py::class_<Message>(m, "Message")
      .def(py::init([](NodeId src, NodeId dst, std::uint16_t seq, Payload payload) {
             return Message{src, dst, seq, payload};
           }),
           py::arg("src"), py::arg("dst"), py::arg("seq"), py::arg("payload"))
      .def_readwrite("src", &Message::src)
      .def_readwrite("dst", &Message::dst)
      .def_readwrite("seq", &Message::seq)
      .def_readwrite("payload", &Message::payload)
      .def_property_readonly("kind", [](const Message& msg) { return std::string(to_string(msg.kind())); })
      .def("__eq__", [](const Message& a, const Message& b) { return a == b; });

  m.def("encode", [](const Message& msg) { return to_bytes(encode(msg)); }, py::arg("message"));
  m.def(
      "decode",
      [](const py::bytes& data) {
        const std::string s = data;
        return decode(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
      },
      py::arg("data"));

  py::class_<Topology>(m, "Topology")
      .def_property_readonly("size", &Topology::size)
      .def_property_readonly("root", &Topology::root)
      .def_property_readonly("depth", &Topology::depth)
      .def_property_readonly("positions",
                             [](const Topology& t) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& p : t.positions()) out.emplace_back(p.x, p.y);
                               return out;
                             })
      .def("neighbors", &Topology::neighbors, py::arg("node"))
      .def("connected", &Topology::connected);

  m.def("make_grid", [](unsigned n) { return make_grid(n); }, py::arg("n"));
  m.def("make_uniform", [](unsigned n, std::uint64_t seed) { return make_uniform(n, seed); }, py::arg("n"),
        py::arg("seed"));

  py::class_<Metrics>(m, "Metrics")
      .def_readonly("n", &Metrics::n)
      .def_readonly("dag_depth", &Metrics::dag_depth)
      .def_property_readonly("setup_ms", [](const Metrics& x) { return ms(x.setup_time); })
      .def_readonly("dio_count", &Metrics::dio_count)
      .def_readonly("dao_count", &Metrics::dao_count)
      .def_readonly("control_retransmissions", &Metrics::control_retransmissions)
      .def_readonly("allocation_failures", &Metrics::allocation_failures)
      .def_readonly("addressing_rate", &Metrics::addressing_rate)
      .def_readonly("up_rate", &Metrics::up_rate)
      .def_readonly("down_rate", &Metrics::down_rate)
      .def_readonly("timed_out", &Metrics::timed_out)
      .def_readonly("stalled", &Metrics::stalled)
      .def_property_readonly("addresses", [](const Metrics& x) {
        py::dict out;
        for (const auto& node : x.nodes) {
          if (node.own_address) out[py::int_(node.id)] = *node.own_address;
        }
        return out;
      });

  m.def(
      "run",
      [](const Topology& topology, const std::string& mode, const std::string& failure, double rate,
         std::uint64_t seed, double reserve_percent, double start_jitter_ms, double link_jitter_ms,
         std::size_t table_capacity) {
        SimConfig c;
        c.topology = topology;
        c.mode = mode_of(mode);
        c.failure = {failure_of(failure), failure == "none" ? 0.0 : rate};
        c.seed = seed;
        c.reserve = ReserveFraction::from_percent(reserve_percent);
        c.start_jitter_max = from_ms(start_jitter_ms);
        c.link_jitter = from_ms(link_jitter_ms);
        c.baseline_table_capacity = table_capacity;
        py::gil_scoped_release release;
        return run(c);
      },
      "Simulate one run and return its metrics.", py::arg("topology"), py::arg("mode") = "greedy",
      py::arg("failure") = "none", py::arg("rate") = 0.0, py::arg("seed") = 1, py::arg("reserve_percent") = 6.25,
      py::arg("start_jitter_ms") = 1000.0, py::arg("link_jitter_ms") = 2.0, py::arg("table_capacity") = 20);
}
