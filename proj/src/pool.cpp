#include "gwh/pool.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "gwh/stats.hpp"

namespace gwh {

void ConductancePool::finalize() {
    sorted = samples;
    std::sort(sorted.begin(), sorted.end());
}

double ConductancePool::min_sample() const {
    if (samples.empty()) throw std::logic_error("empty pool");
    return sorted.empty() ? *std::min_element(samples.begin(), samples.end())
                          : sorted.front();
}

double ConductancePool::mean() const {
    return gwh::mean(std::span<const double>(samples));
}

ConductancePool make_constant_pool(double alpha, std::int64_t size, double value) {
    if (size <= 0) throw std::invalid_argument("pool size must be positive");
    ConductancePool p;
    p.alpha = alpha;
    p.samples.assign(static_cast<std::size_t>(size), value);
    p.sorted = p.samples;
    return p;
}

double pool_moment(const ConductancePool& pool, double p) {
    if (pool.samples.empty()) throw std::logic_error("empty pool");
    double acc = 0.0, comp = 0.0;
    for (double x : pool.samples) {
        double term = std::pow(x, p);
        double y = term - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc / static_cast<double>(pool.samples.size());
}

double wasserstein1(const ConductancePool& a, const ConductancePool& b) {
    if (a.samples.size() != b.samples.size())
        throw std::invalid_argument("wasserstein1: pools differ in size");
    if (a.samples.empty()) throw std::invalid_argument("wasserstein1: empty pools");
    if (a.sorted.size() != a.samples.size() || b.sorted.size() != b.samples.size())
        throw std::logic_error("wasserstein1: pools not finalized");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.sorted.size(); ++i)
        acc += std::fabs(a.sorted[i] - b.sorted[i]);
    return acc / static_cast<double>(a.sorted.size());
}

namespace {

void swap_if_big_endian(std::vector<double>& xs) {
    if constexpr (std::endian::native == std::endian::big) {
        for (double& x : xs) {
            std::uint64_t v;
            std::memcpy(&v, &x, 8);
            v = __builtin_bswap64(v);
            std::memcpy(&x, &v, 8);
        }
    }
}

}  // namespace

void save_pool(const ConductancePool& pool, const std::string& path) {
    {
        std::vector<double> buf = pool.samples;
        swap_if_big_endian(buf);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + path + " for writing");
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size() * sizeof(double)));
        if (!out) throw std::runtime_error("short write to " + path);
    }
    nlohmann::json meta = {
        {"schema_version", 1},
        {"kind", "conductance_pool"},
        {"alpha", pool.alpha},
        {"size", pool.size()},
        {"iterations", pool.iterations},
        {"seed", pool.seed},
        {"converged", pool.converged},
        {"final_d1", pool.final_d1},
    };
    std::ofstream side(path + ".json", std::ios::trunc);
    if (!side) throw std::runtime_error("cannot open " + path + ".json for writing");
    side << meta.dump(2) << "\n";
}

ConductancePool load_pool(const std::string& path) {
    std::ifstream side(path + ".json");
    if (!side) throw std::runtime_error("missing sidecar " + path + ".json");
    nlohmann::json meta = nlohmann::json::parse(side);
    if (meta.value("kind", "") != std::string("conductance_pool"))
        throw std::runtime_error(path + ".json: not a conductance pool sidecar");
    if (meta.value("schema_version", 0) != 1)
        throw std::runtime_error(path + ".json: unsupported schema_version");

    ConductancePool pool;
    pool.alpha = meta.at("alpha").get<double>();
    pool.iterations = meta.at("iterations").get<std::int64_t>();
    pool.seed = meta.at("seed").get<std::uint64_t>();
    pool.converged = meta.value("converged", true);
    pool.final_d1 = meta.value("final_d1", 0.0);
    const auto n = meta.at("size").get<std::int64_t>();

    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto bytes = static_cast<std::int64_t>(in.tellg());
    if (bytes != n * static_cast<std::int64_t>(sizeof(double)))
        throw std::runtime_error(path + ": size disagrees with sidecar");
    in.seekg(0);
    pool.samples.resize(static_cast<std::size_t>(n));
    in.read(reinterpret_cast<char*>(pool.samples.data()), bytes);
    if (!in) throw std::runtime_error("short read from " + path);
    swap_if_big_endian(pool.samples);
    pool.finalize();
    return pool;
}

}  // namespace gwh
