#include "hcf/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace hcf {

namespace {

constexpr char kMagic[8] = {'H', 'C', 'F', 'C', 'K', 'P', 'T', '1'};

std::string bits_of(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(u));
    return buf;
}

double double_of_bits(const std::string& hex) {
    std::uint64_t u = std::strtoull(hex.c_str(), nullptr, 16);
    double v;
    std::memcpy(&v, &u, sizeof v);
    return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const FlowState& state, std::uint64_t seed,
                      std::uint64_t config_hash) {
    const TorusGrid& grid = state.g.grid();
    nlohmann::json header{
        {"format", "hcflow-checkpoint"},
        {"version", 1},
        {"n", grid.n()},
        {"resolution", grid.resolution()},
        {"mode", grid.mode() == DerivativeMode::Spectral ? "spectral" : "fd4"},
        {"period", grid.period(0)},
        {"t", state.t},
        {"t_bits", bits_of(state.t)},
        {"step_count", state.step_count},
        {"seed", seed},
        {"config_hash", config_hash},
        {"data_count", state.g.tensor().raw().size()},
        {"layout",
         "complex<double> little-endian; resolution^(2n) x n x n row-major (grid point "
         "slowest, then i, then j of g_{i jbar}); point index is row-major over the real "
         "axes x^1..x^n,y^1..y^n with axis 0 fastest"},
    };
    const std::string head = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path);
    out.write(kMagic, sizeof kMagic);
    const std::uint64_t len = head.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(head.data(), static_cast<std::streamsize>(head.size()));

    // file order: (point, i, j); in-memory storage is component-major
    const TensorField& g = state.g.tensor();
    const std::size_t np = g.npoints();
    const std::size_t ncomp = g.ncomp();
    std::vector<cplx> row(ncomp);
    for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t c = 0; c < ncomp; ++c) row[c] = g.at(c, p);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(ncomp * sizeof(cplx)));
    }
    if (!out) throw CheckpointError("short write on checkpoint: " + path);
}

CheckpointData read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw CheckpointError("not a checkpoint file (bad magic): " + path);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in || len == 0 || len > (1u << 20)) throw CheckpointError("corrupt header: " + path);
    std::string head(len, '\0');
    in.read(head.data(), static_cast<std::streamsize>(len));
    if (!in) throw CheckpointError("truncated header: " + path);

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(head);
    } catch (const std::exception& e) {
        throw CheckpointError(std::string("malformed checkpoint header: ") + e.what());
    }

    CheckpointData data;
    try {
        data.n = header.at("n").get<int>();
        data.resolution = header.at("resolution").get<int>();
        data.mode = header.at("mode").get<std::string>();
        data.period = header.at("period").get<double>();
        data.t = double_of_bits(header.at("t_bits").get<std::string>());
        data.step_count = header.at("step_count").get<long>();
        data.seed = header.at("seed").get<std::uint64_t>();
        data.config_hash = header.at("config_hash").get<std::uint64_t>();
    } catch (const std::exception& e) {
        throw CheckpointError(std::string("incomplete checkpoint header: ") + e.what());
    }

    GridPtr grid = make_grid(data.n, data.resolution,
                             data.mode == "fd4" ? DerivativeMode::CentralDifference4
                                                : DerivativeMode::Spectral,
                             data.period);
    TensorField g(grid, Signature{lh, la});
    const std::uint64_t expect = header.at("data_count").get<std::uint64_t>();
    if (expect != g.raw().size()) throw CheckpointError("checkpoint data count mismatch: " + path);
    const std::size_t np = g.npoints();
    const std::size_t ncomp = g.ncomp();
    std::vector<cplx> row(ncomp);
    for (std::size_t p = 0; p < np; ++p) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(ncomp * sizeof(cplx)));
        if (!in || in.gcount() != static_cast<std::streamsize>(ncomp * sizeof(cplx)))
            throw CheckpointError("truncated checkpoint data: " + path);
        for (std::size_t c = 0; c < ncomp; ++c) g.at(c, p) = row[c];
    }
    data.g = MetricField(std::move(g));
    return data;
}

FlowState to_flow_state(const CheckpointData& data) {
    FlowState s(MetricField(data.g.tensor().clone()));
    s.t = data.t;
    s.step_count = data.step_count;
    return s;
}

}  // namespace hcf
