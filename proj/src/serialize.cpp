#include "emunet/serialize.hpp"

#include <cstring>
#include <fstream>

#include "emunet/errors.hpp"

namespace emunet {

namespace {

std::string alpha_checksum(const Vector& alpha) {
  std::string bytes(alpha.size() * sizeof(double), '\0');
  std::memcpy(bytes.data(), alpha.data(), bytes.size());
  return fnv1a_hex(bytes);
}

}  // namespace

Json vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const Json& j) {
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  Json data = Json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) data.push_back(m(r, c));
  j["data"] = std::move(data);
  return j;
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw NumericalError("matrix json: data size mismatch");
  Matrix m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = data[i++].get<double>();
  return m;
}

Json domain_to_json(const Domain& d) {
  Json dims = Json::array();
  for (const auto& dim : d.dims())
    dims.push_back({{"name", dim.name}, {"lower", dim.lower}, {"upper", dim.upper}});
  return Json{{"dims", dims}};
}

Domain domain_from_json(const Json& j) {
  std::vector<Dimension> dims;
  for (const auto& dim : j.at("dims"))
    dims.push_back({dim.at("name").get<std::string>(), dim.at("lower").get<double>(),
                    dim.at("upper").get<double>()});
  return Domain(std::move(dims));
}

Json series_to_json(const ScenarioSeries& s) {
  return Json{{"years", s.years},
              {"low", vector_to_json(s.low)},
              {"central", vector_to_json(s.central)},
              {"high", vector_to_json(s.high)}};
}

ScenarioSeries series_from_json(const Json& j) {
  ScenarioSeries s;
  s.years = j.at("years").get<std::vector<int>>();
  s.low = vector_from_json(j.at("low"));
  s.central = vector_from_json(j.at("central"));
  s.high = vector_from_json(j.at("high"));
  s.validate();
  return s;
}

Json shares_to_json(const SeasonShares& s) {
  return Json{{"day", s.day}, {"night", s.night}};
}

SeasonShares shares_from_json(const Json& j) {
  SeasonShares s;
  s.day = j.at("day").get<std::array<double, 4>>();
  s.night = j.at("night").get<std::array<double, 4>>();
  s.validate();
  return s;
}

std::string trend_to_string(TrendKind kind) {
  return kind == TrendKind::Constant ? "constant" : "linear";
}

TrendKind trend_from_string(const std::string& s) {
  if (s == "constant") return TrendKind::Constant;
  if (s == "linear") return TrendKind::Linear;
  throw ConfigError("unknown trend kind: " + s);
}

Json gp_to_json(const GpModel& model) {
  Json j;
  j["domain"] = domain_to_json(model.domain());
  j["trend"] = trend_to_string(model.trend());
  j["beta"] = vector_to_json(model.beta());
  j["lengthscales"] = vector_to_json(model.kernel().lengthscales);
  j["nugget"] = model.kernel().nugget;
  j["sigma2"] = model.sigma2();
  j["inputs_unit"] = matrix_to_json(model.inputs_unit());
  j["outputs"] = vector_to_json(model.outputs());
  j["alpha_checksum"] = alpha_checksum(model.alpha());
  return j;
}

GpModel gp_from_json(const Json& j) {
  KernelSpec kernel{vector_from_json(j.at("lengthscales")), j.at("nugget").get<double>()};
  GpModel model(domain_from_json(j.at("domain")), matrix_from_json(j.at("inputs_unit")),
                vector_from_json(j.at("outputs")), trend_from_string(j.at("trend")), kernel);
  if (alpha_checksum(model.alpha()) != j.at("alpha_checksum").get<std::string>())
    throw NumericalError("gp model artifact inconsistent: recomputed weights do not match checksum");
  return model;
}

Json basis_to_json(const PcBasis& basis) {
  Json j;
  j["mean"] = vector_to_json(basis.mean());
  j["scale"] = basis.scale();
  j["basis"] = matrix_to_json(basis.basis());
  j["singular_values"] = vector_to_json(basis.singular_values());
  j["residual_var"] = vector_to_json(basis.residual_var());
  j["degenerate"] = basis.degenerate();
  return j;
}

PcBasis basis_from_json(const Json& j) {
  return PcBasis(vector_from_json(j.at("mean")), j.at("scale").get<double>(),
                 matrix_from_json(j.at("basis")), vector_from_json(j.at("singular_values")),
                 vector_from_json(j.at("residual_var")), j.at("degenerate").get<bool>());
}

Json mv_to_json(const MvEmulator& em) {
  Json models = Json::array();
  for (const auto& model : em.coeff_models) models.push_back(gp_to_json(model));
  return Json{{"basis", basis_to_json(em.basis)},
              {"coeff_models", models},
              {"provenance", em.provenance},
              {"input_provenance", em.input_provenance}};
}

MvEmulator mv_from_json(const Json& j) {
  MvEmulator em;
  em.basis = basis_from_json(j.at("basis"));
  for (const auto& model : j.at("coeff_models")) em.coeff_models.push_back(gp_from_json(model));
  em.provenance = j.at("provenance").get<std::string>();
  em.input_provenance = j.at("input_provenance").get<std::string>();
  em.validate();
  return em;
}

Json network_to_json(const LinkedNetwork& net) {
  Json nodes = Json::array();
  for (const auto& node : net.nodes()) nodes.push_back(mv_to_json(node));
  Json wiring = Json::array();
  for (const auto& wires : net.wiring()) {
    Json node_wires = Json::array();
    for (const auto& w : wires)
      node_wires.push_back(
          {{"kind", w.kind == WireSource::Kind::Coefficient ? "coefficient" : "exogenous"},
           {"node", w.node},
           {"index", w.index}});
    wiring.push_back(std::move(node_wires));
  }
  return Json{{"nodes", nodes}, {"wiring", wiring}, {"exogenous_dim", net.exogenous_dim()}};
}

LinkedNetwork network_from_json(const Json& j) {
  std::vector<MvEmulator> nodes;
  for (const auto& node : j.at("nodes")) nodes.push_back(mv_from_json(node));
  std::vector<std::vector<WireSource>> wiring;
  for (const auto& node_wires : j.at("wiring")) {
    std::vector<WireSource> wires;
    for (const auto& w : node_wires) {
      WireSource src;
      const std::string kind = w.at("kind").get<std::string>();
      if (kind == "coefficient")
        src.kind = WireSource::Kind::Coefficient;
      else if (kind == "exogenous")
        src.kind = WireSource::Kind::Exogenous;
      else
        throw ConfigError("unknown wire kind: " + kind);
      src.node = w.at("node").get<int>();
      src.index = w.at("index").get<int>();
      wires.push_back(src);
    }
    wiring.push_back(std::move(wires));
  }
  return LinkedNetwork(std::move(nodes), std::move(wiring), j.at("exogenous_dim").get<int>());
}

void save_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingArtifactError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw MissingArtifactError("write failed: " + path.string());
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open: " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("invalid json in " + path.string() + ": " + e.what());
  }
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(bytes);
}

std::string basis_fingerprint(const PcBasis& basis) {
  return fnv1a_hex(basis_to_json(basis).dump());
}

}  // namespace emunet
