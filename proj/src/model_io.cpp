#include <bit>
#include <cstring>
#include <fstream>

#include "tlr/solver.hpp"

namespace tlr {

static_assert(std::endian::native == std::endian::little,
              "model files are written in host order, which must be little-endian");

namespace {

constexpr char kMagic[4] = {'T', 'L', 'R', 'M'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error("model file is truncated");
  return value;
}

void put_matrix(std::ostream& out, const Matrix& x) {
  put<std::int64_t>(out, x.rows());
  put<std::int64_t>(out, x.cols());
  out.write(reinterpret_cast<const char*>(x.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(x.size())));
}

Matrix get_matrix(std::istream& in) {
  const auto rows = get<std::int64_t>(in);
  const auto cols = get<std::int64_t>(in);
  if (rows < 0 || cols < 0 || (rows > 0 && cols > (std::int64_t{1} << 40) / rows)) {
    throw Error("model file has an invalid matrix shape");
  }
  Matrix x(rows, cols);
  in.read(reinterpret_cast<char*>(x.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(x.size())));
  if (!in) throw Error("model file is truncated");
  return x;
}

}  // namespace

void write_model(const TlrModel& model, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, TlrModel::kFormatVersion);
  put<double>(out, model.hyper.alpha);
  put<double>(out, model.hyper.beta);
  put<std::int64_t>(out, model.hyper.k);
  put<double>(out, model.hyper.ridge);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(model.hyper.normalization));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(model.kernel.kind));
  put<std::uint8_t>(out, model.kernel.bandwidth.has_value() ? 1 : 0);
  put<double>(out, model.kernel.bandwidth.value_or(0.0));
  put<std::int64_t>(out, model.n_source);
  put<std::int64_t>(out, model.n_target);
  put_matrix(out, model.w);
  put_matrix(out, Matrix(model.eigenvalues.transpose()));
  put_matrix(out, model.training);
  if (!out) throw Error("failed writing model");
}

TlrModel read_model(std::istream& in) {
  char magic[4] = {};
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw Error("not a TLR model file");
  const auto version = get<std::uint32_t>(in);
  if (version != TlrModel::kFormatVersion) {
    throw Error("unsupported model format version " + std::to_string(version));
  }
  TlrModel model;
  model.hyper.alpha = get<double>(in);
  model.hyper.beta = get<double>(in);
  model.hyper.k = get<std::int64_t>(in);
  model.hyper.ridge = get<double>(in);
  const auto norm = get<std::uint8_t>(in);
  if (norm > 1) throw Error("model file has an unknown normalization tag");
  model.hyper.normalization = static_cast<Normalization>(norm);
  const auto kind = get<std::uint8_t>(in);
  if (kind > 1) throw Error("model file has an unknown kernel tag");
  model.kernel.kind = static_cast<KernelKind>(kind);
  const bool has_bandwidth = get<std::uint8_t>(in) != 0;
  const double bandwidth = get<double>(in);
  if (has_bandwidth) model.kernel.bandwidth = bandwidth;
  model.n_source = get<std::int64_t>(in);
  model.n_target = get<std::int64_t>(in);
  model.w = get_matrix(in);
  model.eigenvalues = get_matrix(in).transpose();
  model.training = get_matrix(in);
  return model;
}

void save_model(const TlrModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_model(model, out);
}

TlrModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_model(in);
}

}  // namespace tlr
