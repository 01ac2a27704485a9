#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "axivort/field.hpp"

namespace axivort {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr std::array<char, 4> kMagic{'A', 'X', 'I', 'V'};

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("read_checkpoint: truncated header");
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Field& field, double time) {
  const Grid& g = field.grid;
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kCheckpointVersion);
  put<double>(out, g.r_max());
  put<double>(out, g.z_max());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.nr()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.nz()));
  put<double>(out, time);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.kind));
  out.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write_checkpoint: stream failure");
}

void write_checkpoint(const std::string& path, const Field& field, double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_checkpoint: cannot open " + path);
  write_checkpoint(out, field, time);
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("read_checkpoint: bad magic");
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw std::runtime_error("read_checkpoint: unsupported version " + std::to_string(version));
  const auto r_max = get<double>(in);
  const auto z_max = get<double>(in);
  const auto nr = get<std::uint32_t>(in);
  const auto nz = get<std::uint32_t>(in);
  const auto time = get<double>(in);
  const auto kind = get<std::uint32_t>(in);
  if (kind > static_cast<std::uint32_t>(FieldKind::velocity_z))
    throw std::runtime_error("read_checkpoint: unknown field kind");
  Checkpoint cp;
  cp.time = time;
  cp.field = Field(Grid(r_max, z_max, nr, nz), static_cast<FieldKind>(kind));
  in.read(reinterpret_cast<char*>(cp.field.values.data()),
          static_cast<std::streamsize>(cp.field.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_checkpoint: truncated payload");
  return cp;
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_checkpoint: cannot open " + path);
  return read_checkpoint(in);
}

void write_field_csv(std::ostream& out, const Field& field) {
  const Grid& g = field.grid;
  out << "r,z,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) out << g.r(i) << ',' << g.z(j) << ',' << field(i, j) << '\n';
}

}  // namespace axivort
