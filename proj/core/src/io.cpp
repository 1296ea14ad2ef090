#include "mrmap/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace mrmap {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  m.data = j.at("data").get<std::vector<double>>();
  if (static_cast<size_t>(m.rows) * m.cols != m.data.size())
    throw std::runtime_error("checkpoint: matrix shape/data mismatch");
  return m;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json train_config_to_json(const TrainConfig& c) {
  return json{{"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"lr", c.lr},
              {"lr_decay_factor", c.lr_decay_factor},
              {"lr_decay_every", c.lr_decay_every},
              {"weight_decay", c.weight_decay},
              {"alpha", c.alpha},
              {"gamma", c.gamma},
              {"sigma", c.sigma},
              {"mask_fraction", c.mask_fraction},
              {"seed", c.seed},
              {"q", c.q},
              {"ell", c.ell},
              {"beta", c.beta},
              {"h", c.h},
              {"cg_iters", c.cg_iters}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.lr = j.at("lr").get<double>();
  c.lr_decay_factor = j.at("lr_decay_factor").get<double>();
  c.lr_decay_every = j.at("lr_decay_every").get<int>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.sigma = j.at("sigma").get<double>();
  c.mask_fraction = j.at("mask_fraction").get<double>();
  c.seed = j.at("seed").get<uint64_t>();
  c.q = j.at("q").get<int>();
  c.ell = j.at("ell").get<int>();
  c.beta = j.at("beta").get<double>();
  c.h = j.at("h").get<double>();
  c.cg_iters = j.at("cg_iters").get<int>();
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const PotentialParams& params,
                     const TrainConfig& config) {
  json layers = json::array();
  for (const auto& layer : params.layers)
    layers.push_back(json{{"K", matrix_to_json(layer.K)}, {"b", layer.b}, {"w", layer.w}});
  json doc{{"format_version", kCheckpointVersion},
           {"config", train_config_to_json(config)},
           {"params",
            {{"p", params.p},
             {"q", params.q},
             {"ell", params.ell},
             {"beta", params.beta},
             {"h", params.h},
             {"sigma", params.sigma},
             {"K", matrix_to_json(params.K)},
             {"layers", layers},
             {"r", params.r},
             {"W_omega", matrix_to_json(params.W_omega)},
             {"b_omega", params.b_omega}}}};
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  auto in = open_in(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("checkpoint parse error in " + path.string() + ": " + e.what());
  }
  const int version = doc.at("format_version").get<int>();
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint version mismatch: found " + std::to_string(version) +
                             ", expected " + std::to_string(kCheckpointVersion));
  Checkpoint ckpt;
  ckpt.format_version = version;
  ckpt.config = train_config_from_json(doc.at("config"));
  const json& p = doc.at("params");
  ckpt.params.p = p.at("p").get<int>();
  ckpt.params.q = p.at("q").get<int>();
  ckpt.params.ell = p.at("ell").get<int>();
  ckpt.params.beta = p.at("beta").get<double>();
  ckpt.params.h = p.at("h").get<double>();
  ckpt.params.sigma = p.at("sigma").get<double>();
  ckpt.params.K = matrix_from_json(p.at("K"));
  for (const json& lj : p.at("layers")) {
    PotentialParams::Layer layer;
    layer.K = matrix_from_json(lj.at("K"));
    layer.b = lj.at("b").get<std::vector<double>>();
    layer.w = lj.at("w").get<std::vector<double>>();
    ckpt.params.layers.push_back(std::move(layer));
  }
  ckpt.params.r = p.at("r").get<std::vector<double>>();
  ckpt.params.W_omega = matrix_from_json(p.at("W_omega"));
  ckpt.params.b_omega = p.at("b_omega").get<std::vector<double>>();
  validate(ckpt.params);
  return ckpt;
}

void save_dataset(const std::filesystem::path& csv_path, const Matrix& data, const json& meta) {
  auto out = open_out(csv_path);
  for (int row = 0; row < data.rows; ++row) out << (row ? "," : "") << "x" << row;
  out << "\n";
  for (int c = 0; c < data.cols; ++c) {
    for (int row = 0; row < data.rows; ++row)
      out << (row ? "," : "") << format_double(data(row, c));
    out << "\n";
  }
  json sidecar = meta;
  sidecar["p"] = data.rows;
  sidecar["n"] = data.cols;
  auto mout = open_out(csv_path.string() + ".json");
  mout << sidecar.dump(2) << "\n";
}

Matrix load_dataset(const std::filesystem::path& csv_path, json* meta) {
  json sidecar;
  {
    auto min = open_in(csv_path.string() + ".json");
    min >> sidecar;
  }
  const int p = sidecar.at("p").get<int>();
  const int n = sidecar.at("n").get<int>();
  auto in = open_in(csv_path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset: missing header");
  Matrix data(p, n);
  for (int c = 0; c < n; ++c) {
    if (!std::getline(in, line)) throw std::runtime_error("dataset: truncated file");
    std::istringstream ss(line);
    std::string cell;
    for (int row = 0; row < p; ++row) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("dataset: short row");
      data(row, c) = std::stod(cell);
    }
  }
  if (meta) *meta = sidecar;
  return data;
}

void write_pgm(const std::filesystem::path& path, const Matrix& image, double lo, double hi) {
  auto out = open_out(path);
  out << "P2\n" << image.cols << " " << image.rows << "\n255\n";
  const double span = hi > lo ? hi - lo : 1.0;
  for (int i = 0; i < image.rows; ++i) {
    for (int j = 0; j < image.cols; ++j) {
      int v = static_cast<int>(std::lround((image(i, j) - lo) / span * 255.0));
      v = std::clamp(v, 0, 255);
      out << (j ? " " : "") << v;
    }
    out << "\n";
  }
}

void write_svg_scatter(const std::filesystem::path& path, const std::vector<ScatterSeries>& series,
                       double xmin, double xmax, double ymin, double ymax,
                       const std::string& title) {
  const int width = 480, height = 480, margin = 40;
  auto out = open_out(path);
  auto sx = [&](double x) {
    return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
  };
  auto sy = [&](double y) {
    return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
  };
  char buf[64];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
      << "\" height=\"" << height - 2 * margin
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  if (!title.empty())
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << title << "</text>\n";
  for (const auto& s : series) {
    for (size_t i = 0; i < s.points.size(); ++i) {
      const auto& [x, y] = s.points[i];
      const std::string& fill =
          (i < s.point_colors.size() && !s.point_colors[i].empty()) ? s.point_colors[i] : s.color;
      std::snprintf(buf, sizeof(buf), "%.2f", sx(x));
      out << "<circle cx=\"" << buf;
      std::snprintf(buf, sizeof(buf), "%.2f", sy(y));
      out << "\" cy=\"" << buf << "\" r=\"" << s.radius << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace mrmap
