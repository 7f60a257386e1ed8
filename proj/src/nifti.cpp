#include "tubetrack/nifti.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

#include <zlib.h>

namespace tubetrack {

namespace {

// Fixed 348-byte NIfTI-1 header. All members are naturally aligned, so the
// struct layout matches the on-disk layout without packing pragmas.
struct Nifti1Header {
    std::int32_t sizeof_hdr;
    char data_type[10];
    char db_name[18];
    std::int32_t extents;
    std::int16_t session_error;
    char regular;
    char dim_info;
    std::int16_t dim[8];
    float intent_p1, intent_p2, intent_p3;
    std::int16_t intent_code;
    std::int16_t datatype;
    std::int16_t bitpix;
    std::int16_t slice_start;
    float pixdim[8];
    float vox_offset;
    float scl_slope;
    float scl_inter;
    std::int16_t slice_end;
    char slice_code;
    char xyzt_units;
    float cal_max, cal_min;
    float slice_duration;
    float toffset;
    std::int32_t glmax, glmin;
    char descrip[80];
    char aux_file[24];
    std::int16_t qform_code;
    std::int16_t sform_code;
    float quatern_b, quatern_c, quatern_d;
    float qoffset_x, qoffset_y, qoffset_z;
    float srow_x[4];
    float srow_y[4];
    float srow_z[4];
    char intent_name[16];
    char magic[4];
};
static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");

enum NiftiDatatype : std::int16_t {
    DT_UINT8 = 2,
    DT_INT16 = 4,
    DT_INT32 = 8,
    DT_FLOAT32 = 16,
    DT_FLOAT64 = 64,
};

template <typename T>
void swap_bytes(T& v) {
    auto* p = reinterpret_cast<unsigned char*>(&v);
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
}

void swap_header(Nifti1Header& h) {
    swap_bytes(h.sizeof_hdr);
    for (auto& d : h.dim) swap_bytes(d);
    swap_bytes(h.intent_code);
    swap_bytes(h.datatype);
    swap_bytes(h.bitpix);
    for (auto& p : h.pixdim) swap_bytes(p);
    swap_bytes(h.vox_offset);
    swap_bytes(h.scl_slope);
    swap_bytes(h.scl_inter);
    swap_bytes(h.qform_code);
    swap_bytes(h.sform_code);
    swap_bytes(h.quatern_b);
    swap_bytes(h.quatern_c);
    swap_bytes(h.quatern_d);
    swap_bytes(h.qoffset_x);
    swap_bytes(h.qoffset_y);
    swap_bytes(h.qoffset_z);
    for (auto& v : h.srow_x) swap_bytes(v);
    for (auto& v : h.srow_y) swap_bytes(v);
    for (auto& v : h.srow_z) swap_bytes(v);
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// gzFile handles both gzipped and plain streams on read. On write, mode "T"
// switches zlib to transparent (uncompressed) output for plain .nii.
class GzStream {
public:
    GzStream(const std::string& path, bool write) : path_(path) {
        const char* mode = write ? (ends_with(path, ".gz") ? "wb" : "wbT") : "rb";
        f_ = gzopen(path.c_str(), mode);
        if (!f_) throw TrackError("cannot open file: " + path);
    }
    ~GzStream() {
        if (f_) gzclose(f_);
    }
    GzStream(const GzStream&) = delete;
    GzStream& operator=(const GzStream&) = delete;

    void read(void* dst, std::size_t n) {
        const int got = gzread(f_, dst, static_cast<unsigned>(n));
        if (got < 0 || static_cast<std::size_t>(got) != n)
            throw TrackError("short read from " + path_);
    }
    void write(const void* src, std::size_t n) {
        const int put = gzwrite(f_, src, static_cast<unsigned>(n));
        if (put < 0 || static_cast<std::size_t>(put) != n)
            throw TrackError("short write to " + path_);
    }
    void skip(std::size_t n) {
        std::vector<char> buf(std::min<std::size_t>(n, 1 << 16));
        while (n > 0) {
            const std::size_t chunk = std::min(n, buf.size());
            read(buf.data(), chunk);
            n -= chunk;
        }
    }

private:
    std::string path_;
    gzFile f_ = nullptr;
};

template <typename Raw>
void decode(GzStream& in, std::size_t count, bool swapped, float slope, float inter,
            std::vector<float>& out) {
    std::vector<Raw> raw(count);
    in.read(raw.data(), count * sizeof(Raw));
    if (swapped && sizeof(Raw) > 1)
        for (auto& v : raw) swap_bytes(v);
    out.resize(count);
    if (slope != 0.0f && (slope != 1.0f || inter != 0.0f)) {
        for (std::size_t i = 0; i < count; ++i)
            out[i] = static_cast<float>(raw[i]) * slope + inter;
    } else {
        for (std::size_t i = 0; i < count; ++i) out[i] = static_cast<float>(raw[i]);
    }
}

Nifti1Header make_header(const Grid& g, std::int16_t datatype, std::int16_t bitpix) {
    Nifti1Header h;
    std::memset(&h, 0, sizeof(h));
    h.sizeof_hdr = 348;
    h.dim[0] = 3;
    h.dim[1] = static_cast<std::int16_t>(g.dims[0]);
    h.dim[2] = static_cast<std::int16_t>(g.dims[1]);
    h.dim[3] = static_cast<std::int16_t>(g.dims[2]);
    for (int i = 4; i < 8; ++i) h.dim[i] = 1;
    h.datatype = datatype;
    h.bitpix = bitpix;
    h.pixdim[0] = 1.0f;
    h.pixdim[1] = static_cast<float>(g.spacing[0]);
    h.pixdim[2] = static_cast<float>(g.spacing[1]);
    h.pixdim[3] = static_cast<float>(g.spacing[2]);
    h.vox_offset = 352.0f;
    h.scl_slope = 1.0f;
    h.scl_inter = 0.0f;
    h.xyzt_units = 2;  // millimeters
    h.sform_code = 1;
    h.qform_code = 0;
    h.srow_x[0] = static_cast<float>(g.spacing[0]);
    h.srow_x[3] = static_cast<float>(g.origin[0]);
    h.srow_y[1] = static_cast<float>(g.spacing[1]);
    h.srow_y[3] = static_cast<float>(g.origin[1]);
    h.srow_z[2] = static_cast<float>(g.spacing[2]);
    h.srow_z[3] = static_cast<float>(g.origin[2]);
    std::memcpy(h.magic, "n+1", 4);
    return h;
}

void write_header_and_data(const Grid& g, std::int16_t datatype, std::int16_t bitpix,
                           const void* bytes, std::size_t nbytes, const std::string& path) {
    Nifti1Header h = make_header(g, datatype, bitpix);
    GzStream out(path, /*write=*/true);
    out.write(&h, sizeof(h));
    const char ext[4] = {0, 0, 0, 0};  // no header extensions
    out.write(ext, 4);
    out.write(bytes, nbytes);
}

}  // namespace

Volume load_nifti(const std::string& path) {
    GzStream in(path, /*write=*/false);
    Nifti1Header h;
    in.read(&h, sizeof(h));

    bool swapped = false;
    if (h.sizeof_hdr != 348) {
        swap_header(h);
        swapped = true;
        if (h.sizeof_hdr != 348) throw TrackError("not a NIfTI-1 file: " + path);
    }
    if (std::memcmp(h.magic, "n+1", 3) != 0 && std::memcmp(h.magic, "ni1", 3) != 0)
        throw TrackError("bad NIfTI magic in " + path);
    if (std::memcmp(h.magic, "ni1", 3) == 0)
        throw TrackError("two-file NIfTI (.hdr/.img) is not supported: " + path);
    if (h.dim[0] < 3) throw TrackError("NIfTI with fewer than 3 dimensions: " + path);
    for (int i = 4; i <= h.dim[0]; ++i)
        if (h.dim[i] > 1) throw TrackError("multi-volume NIfTI is not supported: " + path);
    if (h.dim[1] < 1 || h.dim[2] < 1 || h.dim[3] < 1)
        throw TrackError("inconsistent NIfTI dims in " + path);

    Volume v;
    v.dims = {h.dim[1], h.dim[2], h.dim[3]};
    v.spacing = Vec3(h.pixdim[1], h.pixdim[2], h.pixdim[3]);
    if (v.spacing.minCoeff() <= 0.0) throw TrackError("non-positive pixdim in " + path);
    if (h.sform_code > 0) {
        v.origin = Vec3(h.srow_x[3], h.srow_y[3], h.srow_z[3]);
    } else if (h.qform_code > 0) {
        v.origin = Vec3(h.qoffset_x, h.qoffset_y, h.qoffset_z);
    }

    const std::size_t vox_offset = static_cast<std::size_t>(h.vox_offset);
    if (vox_offset < 348) throw TrackError("bad vox_offset in " + path);
    in.skip(vox_offset - 348);

    const std::size_t n = v.size();
    switch (h.datatype) {
        case DT_UINT8:
            decode<std::uint8_t>(in, n, swapped, h.scl_slope, h.scl_inter, v.data);
            break;
        case DT_INT16:
            decode<std::int16_t>(in, n, swapped, h.scl_slope, h.scl_inter, v.data);
            break;
        case DT_INT32:
            decode<std::int32_t>(in, n, swapped, h.scl_slope, h.scl_inter, v.data);
            break;
        case DT_FLOAT32:
            decode<float>(in, n, swapped, h.scl_slope, h.scl_inter, v.data);
            break;
        case DT_FLOAT64: {
            std::vector<double> raw(n);
            in.read(raw.data(), n * sizeof(double));
            if (swapped)
                for (auto& x : raw) swap_bytes(x);
            v.data.resize(n);
            const float slope = h.scl_slope, inter = h.scl_inter;
            for (std::size_t i = 0; i < n; ++i) {
                double x = raw[i];
                if (slope != 0.0f) x = x * slope + inter;
                v.data[i] = static_cast<float>(x);
            }
            break;
        }
        default:
            throw TrackError("unsupported NIfTI datatype " + std::to_string(h.datatype) +
                             " in " + path);
    }
    return v;
}

void save_nifti_float(const Volume& v, const std::string& path) {
    write_header_and_data(v, DT_FLOAT32, 32, v.data.data(), v.data.size() * sizeof(float), path);
}

void save_nifti_uint8(const VoxelMask& m, const std::string& path) {
    write_header_and_data(m, DT_UINT8, 8, m.data.data(), m.data.size(), path);
}

void save_nifti_int32(const LabelVolume& l, const std::string& path) {
    write_header_and_data(l, DT_INT32, 32, l.data.data(),
                          l.data.size() * sizeof(std::int32_t), path);
}

}  // namespace tubetrack
