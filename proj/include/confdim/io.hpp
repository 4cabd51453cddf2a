#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "confdim/embedding.hpp"
#include "confdim/filling.hpp"
#include "confdim/metric_space.hpp"
#include "confdim/quadmap.hpp"
#include "confdim/weights.hpp"

namespace confdim {

inline constexpr const char* kToolVersion = "0.1.0";

// Space file: magic "CDIM", u32 version = 1, u64 n, then row-major
// little-endian f64 distances. The JSON sidecar (same path + ".json") holds
// {root, anchor, h, mass[]}.
void write_space(const std::filesystem::path& path, const FiniteMetricSpace& space);
FiniteMetricSpace read_space(const std::filesystem::path& path);

void write_quadmap(const std::filesystem::path& path, const QuadMap& map);
QuadMap read_quadmap(const std::filesystem::path& path);

// CSV: vertex_id,x,y
void write_embedding_csv(const std::filesystem::path& path, const PlanarEmbedding& emb);

// CSV: level_u,id_u,level_v,id_v,kind (H or V)
void write_filling_edges_csv(const std::filesystem::path& path, const FillingGraph& g);

// CSV: level,id,sigma,nu,mu,log_pi,rho,varsigma,log_varpi
void write_weights_csv(const std::filesystem::path& path, const FillingGraph& g,
                       const WeightState& st);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// FNV-1a over file bytes, hex-encoded; used by manifests.
std::string file_hash(const std::filesystem::path& path);
std::string bytes_hash(const std::string& bytes);

}  // namespace confdim
