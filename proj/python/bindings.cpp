#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "chemkd/bench.hpp"
#include "chemkd/bruteforce.hpp"
#include "chemkd/cli.hpp"
#include "chemkd/error.hpp"
#include "chemkd/fingerprint.hpp"
#include "chemkd/ged.hpp"
#include "chemkd/kdtree.hpp"
#include "chemkd/mutate.hpp"
#include "chemkd/reduce.hpp"
#include "chemkd/smiles.hpp"

namespace py = pybind11;
using namespace chemkd;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const float> as_span(const FloatArray& a) { return {a.data(), static_cast<std::size_t>(a.size())}; }
std::span<const double> as_span(const DoubleArray& a) { return {a.data(), static_cast<std::size_t>(a.size())}; }

py::list neighbors_to_list(const std::vector<Neighbor>& hits) {
  py::list out;
  for (const auto& n : hits) out.append(py::make_tuple(n.id, n.distance));
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact similarity search over molecular embeddings";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  auto data = py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<SmilesError>(m, "SmilesError", data.ptr());

  // molgraph
  py::enum_<BondOrder>(m, "BondOrder")
      .value("single", BondOrder::kSingle)
      .value("double", BondOrder::kDouble)
      .value("triple", BondOrder::kTriple)
      .value("aromatic", BondOrder::kAromatic);

  py::class_<MolecularGraph>(m, "MolecularGraph")
      .def_property_readonly("atom_count", &MolecularGraph::atom_count)
      .def_property_readonly("bond_count", &MolecularGraph::bond_count)
      .def_property_readonly("cycle_rank", &MolecularGraph::cycle_rank)
      .def_property_readonly("elements",
                             [](const MolecularGraph& g) {
                               std::vector<std::string> out;
                               for (const auto& a : g.atoms()) out.emplace_back(element_symbol(a.element));
                               return out;
                             })
      .def_property_readonly("bonds",
                             [](const MolecularGraph& g) {
                               std::vector<std::tuple<std::uint32_t, std::uint32_t, BondOrder>> out;
                               for (const auto& b : g.bonds()) out.emplace_back(b.a, b.b, b.order);
                               return out;
                             })
      .def("degree", &MolecularGraph::degree)
      .def("__eq__", [](const MolecularGraph& a, const MolecularGraph& b) { return a == b; })
      .def("__repr__", [](const MolecularGraph& g) { return "<MolecularGraph " + write_smiles(g) + ">"; });

  m.def("parse_smiles", &parse_smiles, py::arg("text"));
  m.def("write_smiles", &write_smiles, py::arg("graph"));
  m.def("mutate_substitution",
        [](const MolecularGraph& g, std::size_t i, const std::string& element) {
          const auto z = atomic_number(element);
          if (!z) throw InvalidArgument("unknown element " + element);
          return mutate_substitution(g, i, *z);
        },
        py::arg("graph"), py::arg("atom_index"), py::arg("element"));
  m.def("mutate_addition",
        [](const MolecularGraph& g, std::size_t i, const std::string& element, BondOrder order) {
          const auto z = atomic_number(element);
          if (!z) throw InvalidArgument("unknown element " + element);
          return mutate_addition(g, i, *z, order);
        },
        py::arg("graph"), py::arg("attach_index"), py::arg("element"), py::arg("order") = BondOrder::kSingle);
  m.def("mutate_deletion", &mutate_deletion, py::arg("graph"), py::arg("atom_index"));
  m.def("random_mutant",
        [](const MolecularGraph& g, std::uint64_t seed) {
          Mutant mutant = random_mutant(g, seed);
          return py::make_tuple(std::move(mutant.graph), std::string(mutation_kind_name(mutant.kind)));
        },
        py::arg("graph"), py::arg("seed"));

  // fingerprint
  py::class_<Fingerprint256>(m, "Fingerprint256")
      .def_property_readonly("binary", [](const Fingerprint256& fp) { return fp.kind == FingerprintKind::kBinary; })
      .def_property_readonly("values", [](const Fingerprint256& fp) {
        return py::array_t<std::uint16_t>(fp.values.size(), fp.values.data());
      })
      .def("popcount", &Fingerprint256::popcount)
      .def("total", &Fingerprint256::total)
      .def("__eq__", [](const Fingerprint256& a, const Fingerprint256& b) { return a == b; });
  m.def("ecfp", &ecfp, py::arg("graph"), py::arg("radius") = kDefaultFingerprintRadius);
  m.def("ecfc", &ecfc, py::arg("graph"), py::arg("radius") = kDefaultFingerprintRadius);
  m.def("tanimoto_distance", &tanimoto_distance);

  // reduce
  py::class_<PcaModel>(m, "PcaModel")
      .def_readonly("d_in", &PcaModel::d_in)
      .def_readonly("d_out", &PcaModel::d_out)
      .def_property_readonly("mean", [](const PcaModel& p) { return to_array(p.mean); })
      .def_property_readonly("eigenvalues", [](const PcaModel& p) { return to_array(p.eigenvalues); })
      .def_property_readonly("components",
                             [](const PcaModel& p) {
                               py::array_t<double> out({p.d_out, p.d_in});
                               std::copy(p.components.begin(), p.components.end(), out.mutable_data());
                               return out;
                             })
      .def("apply", [](const PcaModel& p, const DoubleArray& x) { return to_array(p.apply(as_span(x))); })
      .def("save", [](const PcaModel& p, const std::filesystem::path& path) { save_pca(p, path); });
  m.def("pca_fit",
        [](const DoubleArray& samples, std::size_t d_out) {
          if (samples.ndim() != 2) throw InvalidArgument("samples must be a 2-d array");
          return pca_fit(as_span(samples), samples.shape(0), samples.shape(1), d_out);
        },
        py::arg("samples"), py::arg("d_out"));
  m.def("load_pca", &load_pca);

  py::class_<SparseProjection>(m, "SparseProjection")
      .def(py::init<std::size_t, std::size_t, std::uint64_t>(), py::arg("d_in"), py::arg("d_out"), py::arg("seed"))
      .def_property_readonly("d_in", &SparseProjection::d_in)
      .def_property_readonly("d_out", &SparseProjection::d_out)
      .def_property_readonly("seed", &SparseProjection::seed)
      .def("apply", [](const SparseProjection& p, const DoubleArray& x) { return to_array(p.apply(as_span(x))); })
      .def("save", [](const SparseProjection& p, const std::filesystem::path& path) { save_srp(p, path); });
  m.def("load_srp", &load_srp);

  // kdtree
  m.def("build_index",
        [](const std::filesystem::path& embeddings, const std::filesystem::path& out, std::uint32_t leaf_capacity,
           std::uint64_t memory_budget) {
          EmbeddingFileSource source(embeddings);
          const BuildReport r = build_index(source, out, {leaf_capacity, memory_budget, {}});
          return py::dict(py::arg("count") = r.count, py::arg("internal_nodes") = r.internal_nodes,
                          py::arg("leaves") = r.leaves, py::arg("out_of_core") = r.out_of_core);
        },
        py::arg("embeddings"), py::arg("output"), py::arg("leaf_capacity") = kDefaultLeafCapacity,
        py::arg("memory_budget") = kDefaultMemoryBudget);

  py::class_<KdIndex>(m, "KdIndex")
      .def_static("open", &KdIndex::open)
      .def_property_readonly("dim", &KdIndex::dim)
      .def_property_readonly("count", &KdIndex::count)
      .def("knn", [](const KdIndex& idx, const FloatArray& q, std::size_t k) {
        return neighbors_to_list(idx.knn(as_span(q), k));
      })
      .def("range", [](const KdIndex& idx, const FloatArray& lo, const FloatArray& hi) {
        return idx.range(as_span(lo), as_span(hi));
      })
      .def("stats", [](const KdIndex& idx) {
        const IndexStats s = idx.stats();
        return py::dict(py::arg("count") = s.count, py::arg("dim") = s.dim, py::arg("internal_nodes") = s.internal_nodes,
                        py::arg("leaves") = s.leaves, py::arg("height") = s.height, py::arg("bytes") = s.bytes);
      });

  m.def("bf_knn",
        [](const FloatArray& coords, const FloatArray& query, std::size_t k) {
          if (coords.ndim() != 2) throw InvalidArgument("coords must be a 2-d array");
          std::vector<std::uint64_t> ids(coords.shape(0));
          for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
          return neighbors_to_list(bf_knn(ids, as_span(coords), coords.shape(1), as_span(query), k));
        },
        py::arg("coords"), py::arg("query"), py::arg("k"));

  // ged
  m.def("approx_ged", &approx_ged);
  m.def("exact_ged_tiny", &exact_ged_tiny, py::arg("g1"), py::arg("g2"), py::arg("max_atoms") = 8);

  // bench
  m.def("auroc", [](const DoubleArray& actives, const DoubleArray& decoys) {
    return auroc_from_scores(as_span(actives), as_span(decoys)).value();
  });

  // cli
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
