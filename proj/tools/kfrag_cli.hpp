// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "kfrag/kfrag.hpp"
#include "kfrag/report.hpp"

// Command implementations behind the `kfrag` binary. Kept in a header so the
// test suite can drive run_cli in-process.

namespace kfrag::cli {

enum Exit : int {
    kOk = 0,
    kInternal = 1,
    kBadParams = 2,
    kIo = 3,
    kNotEnough = 4,
    kInconsistent = 5,
    kParse = 6,
    kMetricFailure = 7,
};

/// Exit code for a library error.
inline int exit_code(Errc e)
{
    switch (e) {
    case Errc::InvalidParams:
    case Errc::SampleTooSmall:
    case Errc::RangeOutOfBounds: return kBadParams;
    case Errc::RngFailure: return kIo;
    case Errc::NotEnoughFragments: return kNotEnough;
    case Errc::InconsistentSet:
    case Errc::DuplicateIndex: return kInconsistent;
    case Errc::BadMagic:
    case Errc::UnsupportedVersion:
    case Errc::CrcMismatch:
    case Errc::TruncatedInput:
    case Errc::InvalidHeader:
    case Errc::CorruptFragment: return kParse;
    default: return kInternal;
    }
}

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// System CSPRNG unless KFRAG_TEST_RNG_SEED is set (test runs only).
class CliRandom {
public:
    CliRandom()
    {
        if (const char* s = std::getenv("KFRAG_TEST_RNG_SEED"))
            seeded_.emplace(std::strtoull(s, nullptr, 10));
    }

    void fill(std::span<std::uint8_t> out)
    {
        if (seeded_)
            seeded_->fill(out);
        else
            system_.fill(out);
    }

private:
    std::optional<SeededRandom> seeded_;
    SystemRandom system_;
};

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + p.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read error on " + p.string());
    return data;
}

inline void write_file(const std::filesystem::path& p, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + p.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write error on " + p.string());
}

inline std::string hex(std::span<const std::uint8_t> b)
{
    std::ostringstream s;
    for (auto v : b)
        s << std::hex << std::setw(2) << std::setfill('0') << unsigned(v);
    return s.str();
}

/// "2..20" or "2,5,10".
inline std::vector<unsigned> parse_k_range(const std::string& text)
{
    std::vector<unsigned> ks;
    const auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            const unsigned lo = static_cast<unsigned>(std::stoul(text.substr(0, dots)));
            const unsigned hi = static_cast<unsigned>(std::stoul(text.substr(dots + 2)));
            if (lo > hi)
                throw Error(Errc::InvalidParams, "k range " + text + " is empty");
            for (unsigned k = lo; k <= hi; ++k)
                ks.push_back(k);
        } else {
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ','))
                ks.push_back(static_cast<unsigned>(std::stoul(item)));
        }
    } catch (const std::logic_error&) {
        throw Error(Errc::InvalidParams, "cannot parse k range '" + text + "'");
    }
    if (ks.empty())
        throw Error(Errc::InvalidParams, "empty k range");
    return ks;
}

/// Byte count with optional K/M/G (powers of 1024) suffix.
inline std::uint64_t parse_size(const std::string& s)
{
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::logic_error&) {
        throw Error(Errc::InvalidParams, "cannot parse size '" + s + "'");
    }
    const std::string suffix = s.substr(pos);
    if (suffix.empty() || suffix == "B")
        return v;
    if (suffix == "K" || suffix == "KB" || suffix == "KiB")
        return v << 10;
    if (suffix == "M" || suffix == "MB" || suffix == "MiB")
        return v << 20;
    if (suffix == "G" || suffix == "GB" || suffix == "GiB")
        return v << 30;
    throw Error(Errc::InvalidParams, "unknown size suffix '" + suffix + "'");
}

struct FragmentOptions {
    std::string input;
    std::string out_dir = ".";
    unsigned k = 2;
    std::optional<unsigned> n;
    unsigned q = 8;
    std::uint64_t block_chunks = 0;
    unsigned threads = 1;
};

inline int cmd_fragment(const FragmentOptions& o, std::ostream& out)
{
    const CodecParams params = CodecParams::make(o.k, o.n.value_or(o.k), o.q, o.block_chunks);
    const auto data = read_file(o.input);
    CliRandom rng;
    const auto frags = fragment(data, params, rng, o.threads);
    const std::string stem = std::filesystem::path(o.input).filename().string();
    out << "run run_id=" << hex(frags.front().header.run_id) << " k=" << params.k << " n=" << params.n
        << " q=" << params.field.q << " block_chunks=" << params.block_chunks << " original_length=" << data.size()
        << '\n';
    for (const auto& f : frags) {
        const auto path = std::filesystem::path(o.out_dir) / (stem + "." + std::to_string(f.header.frag_index) + ".kfrag");
        const auto bytes = write_fragment(f);
        write_file(path, bytes);
        out << "fragment index=" << f.header.frag_index << " path=" << path.string() << " file_size=" << bytes.size()
            << " payload_length=" << f.payload.size() << '\n';
    }
    return kOk;
}

struct DefragmentOptions {
    std::vector<std::string> inputs;
    std::string output;
    unsigned threads = 1;
};

inline int cmd_defragment(const DefragmentOptions& o, std::ostream& out)
{
    std::vector<Fragment> frags;
    for (const auto& p : o.inputs)
        frags.push_back(parse_fragment(read_file(p)));
    const auto data = defragment(frags, o.threads);
    write_file(o.output, data);
    out << "restored path=" << o.output << " length=" << data.size() << " fragments=" << frags.size() << '\n';
    return kOk;
}

/// Reads the header only; the file size is used to validate the payload
/// length without loading the payload.
inline int cmd_inspect(const std::string& path, std::ostream& out)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::vector<std::uint8_t> head(kHeaderSize);
    in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    const FragmentHeader h = parse_header(head);
    const auto file_size = std::filesystem::file_size(path);
    if (file_size - kHeaderSize < h.payload_length)
        throw Error(Errc::TruncatedInput, "payload has " + std::to_string(file_size - kHeaderSize) + " of " +
                                              std::to_string(h.payload_length) + " bytes");
    if (file_size - kHeaderSize > h.payload_length)
        throw Error(Errc::CorruptFragment, "trailing bytes after payload");
    const auto raw = encode_header(h);
    std::uint32_t crc = 0;
    for (int i = 3; i >= 0; --i)
        crc = (crc << 8) | raw[56 + i];
    out << "header version=" << h.version << " q=" << unsigned(h.q) << " flags=" << unsigned(h.flags) << " k=" << h.k
        << " n=" << h.n << " index=" << h.frag_index << " run_id=" << hex(h.run_id)
        << " original_length=" << h.original_length << " block_chunks=" << h.block_chunks
        << " payload_length=" << h.payload_length << " header_crc=" << std::hex << std::setw(8) << std::setfill('0')
        << crc << std::dec << '\n';
    return kOk;
}

struct EvalOptions {
    std::string input;
    std::string k_range = "2..20";
    unsigned trials = 10;
    std::string report;
    std::string csv_dir;
    std::size_t fragment_size = 1000;
    unsigned q = 8;
};

inline int cmd_eval(const EvalOptions& o, std::ostream& out)
{
    EvalConfig cfg;
    cfg.k_values = parse_k_range(o.k_range);
    cfg.trials = o.trials;
    cfg.fragment_size = o.fragment_size;
    cfg.q = o.q;
    for (unsigned k : cfg.k_values)
        (void)CodecParams::make(k, k, o.q);
    const auto data = read_file(o.input);
    CliRandom rng;
    EvalReport rep = evaluate_full(data, cfg, rng);
    if (!o.csv_dir.empty()) {
        std::filesystem::create_directories(o.csv_dir);
        write_csv_exports(rep, o.csv_dir);
    }
    {
        std::ofstream f(o.report, std::ios::trunc);
        if (!f)
            throw IoError("cannot open " + o.report + " for writing");
        f << to_json(rep).dump(2) << '\n';
        if (!f)
            throw IoError("write error on " + o.report);
    }
    bool all = true;
    for (const auto& v : summarize(rep)) {
        out << "metric name=" << v.metric << " status=" << (v.pass ? "pass" : "fail") << ' ' << v.detail << '\n';
        all = all && v.pass;
    }
    return all ? kOk : kMetricFailure;
}

struct BenchOptions {
    std::string size = "10M";
    unsigned k_min = 2;
    unsigned k_max = 20;
    unsigned threads = 1;
    unsigned repetitions = 3;
    std::string csv;
    unsigned q = 8;
    std::uint64_t min_size = 1u << 20;
};

inline int cmd_bench(const BenchOptions& o, std::ostream& out)
{
    const std::uint64_t size = parse_size(o.size);
    if (size < o.min_size)
        throw Error(Errc::InvalidParams, "benchmark size must be at least 1 MiB");
    if (o.k_min > o.k_max)
        throw Error(Errc::InvalidParams, "k-min exceeds k-max");
    if (o.repetitions < 3)
        throw Error(Errc::InvalidParams, "at least 3 repetitions are required");
    if (o.threads < 1)
        throw Error(Errc::InvalidParams, "threads must be at least 1");
    for (unsigned k = o.k_min; k <= o.k_max; ++k)
        (void)CodecParams::make(k, k, o.q);

    SeededRandom data_rng(0x6b667267);
    std::vector<std::uint8_t> data(static_cast<std::size_t>(size));
    data_rng.fill(data);
    CliRandom rng;

    std::vector<BenchRecord> records;
    std::vector<double> ks, frag_t, defrag_t;
    auto emit = [&](const BenchRecord& r) {
        out << "bench direction=" << r.direction << " k=" << r.k << " n=" << r.n << " size=" << r.data_size
            << " threads=" << r.threads << " median_s=" << r.median << " throughput_Bps=" << r.throughput << '\n';
        records.push_back(r);
    };
    for (unsigned k = o.k_min; k <= o.k_max; ++k) {
        const std::uint64_t bc = o.threads > 1 ? block_chunks_for(size, k, o.q / 8, o.threads) : 0;
        const CodecParams p = CodecParams::make(k, k, o.q, bc);
        const auto fr = bench_fragment(data, p, o.threads, o.repetitions, rng);
        emit(fr);
        const auto frags = fragment(data, p, rng, o.threads);
        const auto dr = bench_defragment(frags, o.threads, o.repetitions);
        emit(dr);
        ks.push_back(k);
        frag_t.push_back(fr.median);
        defrag_t.push_back(dr.median);
        if (o.threads > 1) {
            const auto base = bench_fragment(data, p, 1, o.repetitions, rng);
            emit(base);
            out << "speedup direction=fragment k=" << k << " threads=" << o.threads << " value=" << base.median / fr.median
                << '\n';
        }
    }
    if (ks.size() >= 2) {
        const auto ff = fit_line(ks, frag_t);
        const auto df = fit_line(ks, defrag_t);
        out << "fit direction=fragment slope_s_per_k=" << ff.slope << " intercept_s=" << ff.intercept << " r2=" << ff.r2
            << '\n';
        out << "fit direction=defragment slope_s_per_k=" << df.slope << " intercept_s=" << df.intercept
            << " r2=" << df.r2 << '\n';
    }
    if (!o.csv.empty()) {
        std::ofstream f(o.csv, std::ios::trunc);
        if (!f)
            throw IoError("cannot open " + o.csv + " for writing");
        f << "kind,direction,k,n,data_size,threads,run,wall_time_s,throughput_Bps\n";
        for (const auto& r : records) {
            for (std::size_t i = 0; i < r.runs.size(); ++i)
                f << "raw," << r.direction << ',' << r.k << ',' << r.n << ',' << r.data_size << ',' << r.threads << ','
                  << i << ',' << r.runs[i] << ',' << static_cast<double>(r.data_size) / r.runs[i] << '\n';
            f << "median," << r.direction << ',' << r.k << ',' << r.n << ',' << r.data_size << ',' << r.threads
              << ",-1," << r.median << ',' << r.throughput << '\n';
        }
        if (!f)
            throw IoError("write error on " + o.csv);
    }
    return kOk;
}

/// Parses argv and runs one subcommand. Diagnostics go to err.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Keyless k-of-n data fragmentation"};
    app.require_subcommand(1);

    FragmentOptions fo;
    auto* frag = app.add_subcommand("fragment", "split a file into n fragment files");
    frag->add_option("input", fo.input, "file to fragment")->required();
    frag->add_option("-o,--out-dir", fo.out_dir, "directory for the .kfrag files");
    frag->add_option("-k", fo.k, "fragments needed for recovery")->required();
    frag->add_option("-n", fo.n, "fragments produced (default: k)");
    frag->add_option("-q", fo.q, "field width in bits (8 or 16)");
    frag->add_option("--block-chunks", fo.block_chunks, "chunk sets per independently seeded block (0: one block)");
    frag->add_option("--threads", fo.threads, "worker threads for block mode");

    DefragmentOptions dop;
    auto* defrag = app.add_subcommand("defragment", "restore a file from k or more fragments");
    defrag->add_option("fragments", dop.inputs, "fragment files")->required();
    defrag->add_option("-o,--output", dop.output, "restored file")->required();
    defrag->add_option("--threads", dop.threads, "decode threads");

    std::string inspect_path;
    auto* insp = app.add_subcommand("inspect", "print a fragment header");
    insp->add_option("fragment", inspect_path, "fragment file")->required();

    EvalOptions eo;
    auto* ev = app.add_subcommand("eval", "statistical evaluation of the fragmentation output");
    ev->add_option("input", eo.input, "sample data")->required();
    ev->add_option("--k-range", eo.k_range, "k values: 'a..b' or comma list");
    ev->add_option("--trials", eo.trials, "samples per k");
    ev->add_option("--report", eo.report, "JSON report path")->required();
    ev->add_option("--csv-dir", eo.csv_dir, "directory for CSV exports");
    ev->add_option("--fragment-size", eo.fragment_size, "share bytes per fragment and sample");
    ev->add_option("-q", eo.q, "field width in bits (8 or 16)");

    BenchOptions bo;
    auto* bench = app.add_subcommand("bench", "timing of fragment/defragment across k");
    bench->add_option("--size", bo.size, "input size, K/M/G suffixes are powers of 1024");
    bench->add_option("--k-min", bo.k_min, "smallest k");
    bench->add_option("--k-max", bo.k_max, "largest k");
    bench->add_option("--threads", bo.threads, "threads (>1 enables block mode)");
    bench->add_option("--repetitions", bo.repetitions, "timed runs per point (>= 3)");
    bench->add_option("--csv", bo.csv, "CSV output path");
    bench->add_option("-q", bo.q, "field width in bits (8 or 16)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kBadParams;
    }

    try {
        if (*frag)
            return cmd_fragment(fo, out);
        if (*defrag)
            return cmd_defragment(dop, out);
        if (*insp)
            return cmd_inspect(inspect_path, out);
        if (*ev)
            return cmd_eval(eo, out);
        if (*bench)
            return cmd_bench(bo, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const IoError& e) {
        err << "error: IoError: " << e.what() << '\n';
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: IoError: " << e.what() << '\n';
        return kIo;
    } catch (const std::ios_base::failure& e) {
        err << "error: IoError: " << e.what() << '\n';
        return kIo;
    }
    return kInternal;
}

}  // namespace kfrag::cli
