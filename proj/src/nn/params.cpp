#include "cascadefuse/nn/params.hpp"

#include <bit>
#include <cmath>
#include <fstream>

#include "cascadefuse/error.hpp"

namespace cascadefuse::nn {

Parameter& ParameterSet::add(std::string name, std::vector<std::size_t> shape) {
  if (index_.count(name)) throw Error(ErrorCode::ConfigMismatch, "duplicate parameter '" + name + "'");
  index_.emplace(name, params_.size());
  Tensor zeros(std::move(shape));
  params_.push_back(Parameter{std::move(name), zeros, zeros, zeros, zeros});
  return params_.back();
}

bool ParameterSet::contains(std::string_view name) const { return index_.count(std::string(name)) > 0; }

std::size_t ParameterSet::index_of(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) throw Error(ErrorCode::ConfigMismatch, "unknown parameter '" + std::string(name) + "'");
  return it->second;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p.grad.fill(0.0);
}

void ParameterSet::glorot_init(std::mt19937_64& rng) {
  for (auto& p : params_) {
    if (p.name.size() >= 2 && p.name.compare(p.name.size() - 2, 2, ".b") == 0) {
      p.value.fill(0.0);
      continue;
    }
    const auto& shape = p.value.shape();
    const double fan_in = static_cast<double>(shape.size() == 2 ? shape[0] : 1);
    const double fan_out = static_cast<double>(shape.back());
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : p.value.data()) v = dist(rng);
  }
}

void ParameterSet::copy_values_from(const ParameterSet& other) {
  if (other.size() != size()) throw Error(ErrorCode::ShapeMismatch, "parameter sets differ in size");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].value.same_shape(other.params_[i].value))
      throw Error(ErrorCode::ShapeMismatch, "parameter '" + params_[i].name + "' changed shape");
    params_[i].value = other.params_[i].value;
  }
}

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes little-endian hosts");

constexpr char kMagic[4] = {'C', 'F', 'C', 'K'};

template <class T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error(ErrorCode::IoError, "truncated checkpoint");
  return v;
}

}  // namespace

void save_checkpoint(const ParameterSet& params, const std::string& path, const nlohmann::json& manifest) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write checkpoint '" + path + "'");
  os.write(kMagic, 4);
  write_pod(os, kCheckpointVersion);
  write_pod(os, static_cast<std::uint32_t>(params.size()));
  nlohmann::json table = nlohmann::json::array();
  for (const auto& p : params) {
    write_pod(os, static_cast<std::uint32_t>(p.name.size()));
    os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    write_pod(os, static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) write_pod(os, static_cast<std::uint64_t>(d));
    os.write(reinterpret_cast<const char*>(p.value.data().data()),
             static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    table.push_back({{"name", p.name}, {"shape", p.value.shape()}});
  }
  if (!os) throw Error(ErrorCode::IoError, "failed writing checkpoint '" + path + "'");

  nlohmann::json doc = manifest;
  doc["format_version"] = kCheckpointVersion;
  doc["parameters"] = table;
  std::ofstream js(path + ".json");
  js << doc.dump(2) << '\n';
  if (!js) throw Error(ErrorCode::IoError, "cannot write checkpoint manifest for '" + path + "'");
}

ParameterSet load_checkpoint(const std::string& path, nlohmann::json* manifest) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot read checkpoint '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != std::string(kMagic, 4))
    throw Error(ErrorCode::IoError, "'" + path + "' is not a checkpoint");
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    throw Error(ErrorCode::IoError, "unsupported checkpoint version " + std::to_string(version));
  const auto count = read_pod<std::uint32_t>(is);
  ParameterSet params;
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto name_len = read_pod<std::uint32_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    const auto rank = read_pod<std::uint32_t>(is);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(read_pod<std::uint64_t>(is));
    Parameter& p = params.add(name, shape);
    is.read(reinterpret_cast<char*>(p.value.data().data()), static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    if (!is) throw Error(ErrorCode::IoError, "truncated checkpoint '" + path + "'");
  }
  if (manifest) {
    std::ifstream js(path + ".json");
    if (!js) throw Error(ErrorCode::IoError, "missing manifest '" + path + ".json'");
    try {
      *manifest = nlohmann::json::parse(js);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::IoError, std::string("bad checkpoint manifest: ") + e.what());
    }
  }
  return params;
}

}  // namespace cascadefuse::nn
