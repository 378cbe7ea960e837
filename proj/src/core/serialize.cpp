#include "core/serialize.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace ellab {
namespace {

constexpr char kMagic[8] = {'E', 'L', 'F', 'L', 'D', '0', '0', '1'};
constexpr long kJsonNodeCap = 20000;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

uint32_t get_u32(const std::string& in, size_t& pos) {
  require(pos + 4 <= in.size(), ErrorCode::IoError, "field file truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<uint32_t>(static_cast<unsigned char>(in[pos++])) << (8 * i);
  return v;
}

double get_f64(const std::string& in, size_t& pos) {
  require(pos + 8 <= in.size(), ErrorCode::IoError, "field file truncated");
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<uint64_t>(static_cast<unsigned char>(in[pos++])) << (8 * i);
  double v = 0.0;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

void write_payload(const std::string& path, int kind, const GridSpec& spec,
                   const std::vector<double>& values, int comps) {
  require(static_cast<long>(values.size()) == spec.node_count() * comps,
          ErrorCode::Internal, "field payload size mismatch");
  std::string out;
  out.reserve(64 + values.size() * 8);
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<uint32_t>(kind));
  put_u32(out, static_cast<uint32_t>(spec.n()));
  put_u32(out, static_cast<uint32_t>(spec.m));
  put_u32(out, 0);  // reserved
  for (int a = 0; a < 3; ++a) put_f64(out, spec.domain.center[a]);
  put_f64(out, spec.domain.half_side);
  for (double v : values) put_f64(out, v);
  write_text_file(path, out);
}

GridSpec read_header(const std::string& in, size_t& pos, int expect_kind,
                     int* comps_out) {
  require(in.size() >= sizeof(kMagic) &&
              std::memcmp(in.data(), kMagic, sizeof(kMagic)) == 0,
          ErrorCode::IoError, "not a field file (bad magic)");
  pos = sizeof(kMagic);
  const int kind = static_cast<int>(get_u32(in, pos));
  require(kind == expect_kind, ErrorCode::IoError,
          "field file holds a different field kind");
  const int n = static_cast<int>(get_u32(in, pos));
  const int m = static_cast<int>(get_u32(in, pos));
  get_u32(in, pos);  // reserved
  require(n == 2 || n == 3, ErrorCode::IoError, "field file dimension");
  std::array<double, 3> center{0.0, 0.0, 0.0};
  for (int a = 0; a < 3; ++a) center[a] = get_f64(in, pos);
  const double half = get_f64(in, pos);
  GridSpec spec(Cube(center, half, n), m);
  *comps_out = kind == 0 ? 1 : (kind == 1 ? n : n * n);
  return spec;
}

std::vector<double> read_values(const std::string& in, size_t pos,
                                const GridSpec& spec, int comps) {
  const long count = spec.node_count() * comps;
  require(in.size() == pos + static_cast<size_t>(count) * 8, ErrorCode::IoError,
          "field file payload size mismatch");
  std::vector<double> values(static_cast<size_t>(count));
  for (double& v : values) v = get_f64(in, pos);
  return values;
}

nlohmann::json cube_json(const Cube& q) {
  nlohmann::json j;
  j["center"] = std::vector<double>(q.center.begin(), q.center.begin() + q.n);
  j["half_side"] = q.half_side;
  j["n"] = q.n;
  return j;
}

Cube cube_from(const nlohmann::json& j) { return cube_from_json(j.dump()); }

std::vector<long> rle_encode(const std::vector<char>& mask) {
  std::vector<long> runs;
  char current = 0;  // runs alternate starting with the zero value
  long len = 0;
  for (char c : mask) {
    const char bit = c != 0 ? 1 : 0;
    if (bit == current) {
      ++len;
    } else {
      runs.push_back(len);
      current = bit;
      len = 1;
    }
  }
  runs.push_back(len);
  return runs;
}

std::vector<char> rle_decode(const std::vector<long>& runs, long size) {
  std::vector<char> mask;
  mask.reserve(static_cast<size_t>(size));
  char current = 0;
  for (long len : runs) {
    require(len >= 0, ErrorCode::IoError, "negative run length in mask");
    mask.insert(mask.end(), static_cast<size_t>(len), current);
    current = current == 0 ? 1 : 0;
  }
  require(static_cast<long>(mask.size()) == size, ErrorCode::IoError,
          "run-length mask does not cover the grid");
  return mask;
}

nlohmann::json parse_or_throw(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, std::string(what) + " parse: " + e.what());
  }
}

}  // namespace

void write_field(const std::string& path, const ScalarField& f) {
  write_payload(path, 0, f.spec, f.v, 1);
}

void write_field(const std::string& path, const VectorField& f) {
  write_payload(path, 1, f.spec, f.v, f.spec.n());
}

void write_field(const std::string& path, const MatrixField& f) {
  write_payload(path, 2, f.spec, f.v, f.spec.n() * f.spec.n());
}

ScalarField read_scalar_field(const std::string& path) {
  const std::string in = read_text_file(path);
  size_t pos = 0;
  int comps = 0;
  ScalarField f(read_header(in, pos, 0, &comps));
  f.v = read_values(in, pos, f.spec, comps);
  return f;
}

VectorField read_vector_field(const std::string& path) {
  const std::string in = read_text_file(path);
  size_t pos = 0;
  int comps = 0;
  VectorField f(read_header(in, pos, 1, &comps));
  f.v = read_values(in, pos, f.spec, comps);
  return f;
}

MatrixField read_matrix_field(const std::string& path) {
  const std::string in = read_text_file(path);
  size_t pos = 0;
  int comps = 0;
  MatrixField f(read_header(in, pos, 2, &comps));
  f.v = read_values(in, pos, f.spec, comps);
  return f;
}

std::string field_to_json(const ScalarField& f) {
  require(f.spec.node_count() <= kJsonNodeCap, ErrorCode::InvalidArgument,
          "field too large for JSON form; use the binary layout");
  nlohmann::json j;
  j["kind"] = "scalar";
  j["m"] = f.spec.m;
  j["domain"] = cube_json(f.spec.domain);
  j["values"] = f.v;
  return j.dump();
}

ScalarField scalar_field_from_json(const std::string& text) {
  const nlohmann::json j = parse_or_throw(text, "field json");
  require(j.contains("kind") && j.contains("m") && j.contains("domain") &&
              j.contains("values"),
          ErrorCode::IoError, "field json missing kind/m/domain/values");
  require(j["kind"].get<std::string>() == "scalar", ErrorCode::IoError,
          "field json holds a different field kind");
  ScalarField f(GridSpec(cube_from(j["domain"]), j["m"].get<int>()));
  auto values = j["values"].get<std::vector<double>>();
  require(static_cast<long>(values.size()) == f.spec.node_count(),
          ErrorCode::IoError, "field json value count mismatch");
  f.v = std::move(values);
  return f;
}

std::string cubes_to_json(const std::vector<Cube>& cubes) {
  nlohmann::json j = nlohmann::json::array();
  for (const Cube& q : cubes) j.push_back(cube_json(q));
  return j.dump();
}

std::vector<Cube> cubes_from_json(const std::string& text) {
  const nlohmann::json j = parse_or_throw(text, "cube family json");
  require(j.is_array(), ErrorCode::IoError, "cube family json must be an array");
  std::vector<Cube> cubes;
  cubes.reserve(j.size());
  for (const auto& item : j) cubes.push_back(cube_from(item));
  return cubes;
}

std::string sparse_family_to_json(const SparseFamily& s) {
  nlohmann::json j;
  j["epsilon"] = s.epsilon;
  j["ref"] = {{"domain", cube_json(s.ref.domain)}, {"m", s.ref.m}};
  j["cubes"] = nlohmann::json::array();
  for (const Cube& q : s.cubes) j["cubes"].push_back(cube_json(q));
  j["masks"] = nlohmann::json::array();
  for (const auto& mask : s.chosen) {
    require(static_cast<long>(mask.size()) == s.ref.node_count(),
            ErrorCode::Internal, "chosen mask size mismatch");
    j["masks"].push_back(rle_encode(mask));
  }
  return j.dump();
}

SparseFamily sparse_family_from_json(const std::string& text) {
  const nlohmann::json j = parse_or_throw(text, "sparse family json");
  require(j.contains("epsilon") && j.contains("ref") && j.contains("cubes") &&
              j.contains("masks"),
          ErrorCode::IoError, "sparse family json missing fields");
  SparseFamily s;
  s.epsilon = j["epsilon"].get<double>();
  s.ref = GridSpec(cube_from(j["ref"]["domain"]), j["ref"]["m"].get<int>());
  for (const auto& item : j["cubes"]) s.cubes.push_back(cube_from(item));
  for (const auto& runs : j["masks"]) {
    s.chosen.push_back(
        rle_decode(runs.get<std::vector<long>>(), s.ref.node_count()));
  }
  require(s.cubes.size() == s.chosen.size(), ErrorCode::IoError,
          "sparse family cube/mask count mismatch");
  return s;
}

std::string trace_to_json(const IterationTrace& t) {
  nlohmann::json j;
  j["variant"] = t.variant == SplitVariant::lq ? "lq" : "holder";
  j["depth"] = t.depth;
  j["exponent"] = t.exponent;
  j["decay_ratio"] = t.decay_ratio;
  j["truncated"] = t.truncated;
  j["levels"] = nlohmann::json::array();
  for (const IterationLevel& lv : t.levels) {
    j["levels"].push_back({{"k", lv.k},
                           {"cube_count", lv.cube_count},
                           {"evaluated", lv.evaluated},
                           {"term_sum", lv.term_sum},
                           {"remainder", lv.remainder},
                           {"subcube_side", lv.subcube_side},
                           {"work_cells", lv.work_cells},
                           {"fresh_m", lv.fresh_m}});
  }
  return j.dump();
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::IoError, "cannot open for writing: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  require(out.good(), ErrorCode::IoError, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open for reading: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  require(!in.bad(), ErrorCode::IoError, "read failed: " + path);
  return text;
}

void write_dat(const std::string& path, const std::vector<double>& x,
               const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorCode::InvalidArgument,
          "plot columns must have equal length");
  std::string out;
  for (size_t i = 0; i < x.size(); ++i) {
    out += format_g17(x[i]);
    out += ' ';
    out += format_g17(y[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace ellab
