#include "ds/sampler.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "ds/format.hpp"
#include "ds/math_util.hpp"
#include "ds/matrix_io.hpp"
#include "ds/parallel.hpp"
#include "ds/rng.hpp"

namespace ds {

double sampling_radius(const std::vector<double>& norms, double q) {
    if (norms.empty()) throw std::invalid_argument("sampling_radius: empty norms");
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("sampling_radius: need 0 < q <= 1");
    const double r = quantile(norms, q);
    bool all_zero = true;
    for (double v : norms) {
        if (v != 0.0) {
            all_zero = false;
            break;
        }
    }
    if (all_zero) throw std::invalid_argument("sampling_radius: all norms are zero (degenerate embedding)");
    return r;
}

SamplePoints sample_ball(std::size_t n, std::size_t dim, double radius,
                         std::uint64_t seed, unsigned threads) {
    if (dim < 1) throw std::invalid_argument("sample_ball: dim must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("sample_ball: radius must be positive");

    SamplePoints out;
    out.dim = dim;
    out.radius = radius;
    out.seed = seed;
    out.points = Matrix(n, dim);

    const double inv_d = 1.0 / static_cast<double>(dim);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            NormalSampler rng(stream_seed(seed, j));
            double* z = out.points.row(j);
            double norm_sq = 0.0;
            do {
                norm_sq = 0.0;
                for (std::size_t a = 0; a < dim; ++a) {
                    z[a] = rng.next();
                    norm_sq += z[a] * z[a];
                }
            } while (norm_sq == 0.0);
            const double u = rng.next_unit();
            const double scale = std::pow(u, inv_d) * radius / std::sqrt(norm_sq);
            for (std::size_t a = 0; a < dim; ++a) z[a] *= scale;
        }
    });
    return out;
}

void save_sample_points(const SamplePoints& samples, const std::string& matrix_path,
                        const std::string& meta_path) {
    save_matrix_dsm(samples.points, matrix_path);
    std::ofstream meta(meta_path, std::ios::binary);
    if (!meta) throw std::runtime_error("cannot write sample metadata: " + meta_path);
    meta << "n = " << samples.count() << '\n'
         << "d = " << samples.dim << '\n'
         << "radius = " << format_double(samples.radius) << '\n'
         << "seed = " << samples.seed << '\n'
         << "generator = " << kSamplerGenerator << '\n';
    if (!meta) throw std::runtime_error("write failed: " + meta_path);
}

SamplePoints load_sample_points(const std::string& matrix_path, const std::string& meta_path) {
    std::ifstream meta(meta_path, std::ios::binary);
    if (!meta) throw std::runtime_error("cannot open sample metadata: " + meta_path);
    std::unordered_map<std::string, std::string> kv;
    std::string line;
    while (std::getline(meta, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    for (const char* key : {"n", "d", "radius", "seed", "generator"}) {
        if (!kv.contains(key)) throw std::runtime_error(meta_path + ": missing key \"" + key + "\"");
    }
    if (kv["generator"] != kSamplerGenerator) {
        throw std::runtime_error(meta_path + ": unknown generator \"" + kv["generator"] + "\"");
    }

    SamplePoints out;
    out.points = load_matrix_dsm(matrix_path);
    out.dim = std::stoull(kv["d"]);
    out.radius = std::stod(kv["radius"]);
    out.seed = std::stoull(kv["seed"]);
    if (out.points.cols != out.dim || out.points.rows != std::stoull(kv["n"])) {
        throw std::runtime_error(meta_path + ": metadata does not match matrix shape");
    }
    return out;
}

}  // namespace ds
