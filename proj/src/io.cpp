#include "confdim/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "confdim/errors.hpp"
#include "confdim/rng.hpp"

namespace confdim {

namespace {
constexpr char kMagic[4] = {'C', 'D', 'I', 'M'};

// Full triangle validation is cubic; beyond this size the loader checks a
// fixed random sample of triples instead.
constexpr int kFullTriangleCap = 800;
}  // namespace

void write_space(const std::filesystem::path& path, const FiniteMetricSpace& space) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out.write(kMagic, 4);
  std::uint32_t version = 1;
  std::uint64_t n = static_cast<std::uint64_t>(space.n_points());
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(space.raw().data()),
            static_cast<std::streamsize>(space.raw().size() * sizeof(double)));
  if (!out) throw IoError("short write to " + path.string());

  nlohmann::json side;
  side["root"] = space.root();
  side["anchor"] = space.has_anchor() ? nlohmann::json(space.anchor()) : nlohmann::json();
  side["h"] = space.proximity_scale();
  side["mass"] = space.has_mass() ? nlohmann::json(space.masses()) : nlohmann::json::array();
  write_text(path.string() + ".json", side.dump(2));
}

FiniteMetricSpace read_space(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t n = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw IoError("bad magic in " + path.string());
  if (version != 1) throw IoError("unsupported space file version");
  std::vector<double> dist(n * n);
  in.read(reinterpret_cast<char*>(dist.data()), static_cast<std::streamsize>(n * n * 8));
  if (!in) throw IoError("short read from " + path.string());

  int root = 0;
  std::optional<int> anchor;
  std::optional<std::vector<double>> mass;
  std::optional<double> h;
  std::filesystem::path side = path.string() + ".json";
  if (std::filesystem::exists(side)) {
    nlohmann::json j = nlohmann::json::parse(read_text(side));
    root = j.value("root", 0);
    if (j.contains("anchor") && !j["anchor"].is_null()) anchor = j["anchor"].get<int>();
    if (j.contains("mass") && j["mass"].is_array() && !j["mass"].empty())
      mass = j["mass"].get<std::vector<double>>();
    if (j.contains("h")) h = j["h"].get<double>();
  }
  int ni = static_cast<int>(n);
  FiniteMetricSpace sp = FiniteMetricSpace::build(std::move(dist), ni, root, anchor,
                                                  std::move(mass), h,
                                                  /*check_triangle=*/ni <= kFullTriangleCap);
  if (ni > kFullTriangleCap) {
    Rng rng = make_rng(0xC0FFEE);
    std::uniform_int_distribution<int> pick(0, ni - 1);
    for (int k = 0; k < 2'000'000; ++k) {
      int i = pick(rng), j = pick(rng), l = pick(rng);
      if (sp.dist(i, j) > sp.dist(i, l) + sp.dist(l, j) + 1e-9)
        throw TriangleViolation("sampled triple (" + std::to_string(i) + "," + std::to_string(j) +
                                " via " + std::to_string(l) + ")");
    }
  }
  return sp;
}

void write_quadmap(const std::filesystem::path& path, const QuadMap& map) {
  write_text(path, map.to_json());
}

QuadMap read_quadmap(const std::filesystem::path& path) {
  return QuadMap::from_json(read_text(path));
}

void write_embedding_csv(const std::filesystem::path& path, const PlanarEmbedding& emb) {
  std::ostringstream out;
  out << "vertex_id,x,y\n";
  out.precision(17);
  for (std::size_t v = 0; v < emb.pos.size(); ++v)
    out << v << ',' << emb.pos[v].x << ',' << emb.pos[v].y << '\n';
  write_text(path, out.str());
}

void write_filling_edges_csv(const std::filesystem::path& path, const FillingGraph& g) {
  std::ostringstream out;
  out << "level_u,id_u,level_v,id_v,kind\n";
  for (int n = 0; n < g.n_levels(); ++n)
    for (int i = 0; i < g.level_size(n); ++i) {
      for (int j : g.horizontal(n, i))
        if (j > i) out << n << ',' << i << ',' << n << ',' << j << ",H\n";
      for (int j : g.vertical_up(n, i)) out << n << ',' << i << ',' << n + 1 << ',' << j << ",V\n";
    }
  write_text(path, out.str());
}

void write_weights_csv(const std::filesystem::path& path, const FillingGraph& g,
                       const WeightState& st) {
  std::ostringstream out;
  out << "level,id,sigma,nu,mu,log_pi,rho,varsigma,log_varpi\n";
  out.precision(17);
  auto get = [](const std::vector<double>& v, int f) { return v.empty() ? 0.0 : v[f]; };
  for (int n = 0; n < g.n_levels(); ++n)
    for (int i = 0; i < g.level_size(n); ++i) {
      int f = g.flat(n, i);
      out << n << ',' << i << ',' << get(st.sigma, f) << ',' << get(st.nu, f) << ','
          << get(st.mu, f) << ',' << get(st.log_pi, f) << ',' << std::exp(get(st.log_rho, f))
          << ',' << (st.varsigma.empty() ? 1.0 : st.varsigma[f]) << ',' << get(st.log_varpi, f)
          << '\n';
    }
  write_text(path, out.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string bytes_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::filesystem::path& path) { return bytes_hash(read_text(path)); }

}  // namespace confdim
