/*
 * Native batch kernels for the filter-backed one-time signature scheme.
 *
 * Hot paths only: message-hash index splitting, and batched insert /
 * membership-check of (element || index) strings against the partitioned
 * single-hash Bloom filter.  The non-cryptographic hashing happens inside
 * the batch loop so a whole signature (k elements) or key generation
 * (t elements) costs one Python call.
 *
 * All reductions are exact: each partition carries a 128-bit Lemire
 * reciprocal (valid for divisors < 2^28) and the table of 2^(32j) mod n
 * so the full big-endian digest integer is reduced without bignum math.
 * The pure-Python paths in ohbf.py compute the same values with int
 * arithmetic; the test suite pins both routes against each other.
 */

#define PY_SSIZE_T_CLEAN
#include <Python.h>

#include <stdint.h>
#include <string.h>

#define XXH_INLINE_ALL
#include "xxhash.h"

#include "city.h"
#ifdef __SSE4_2__
#include "citycrc.h"
#endif

/* Algorithm codes shared with tvpdhors.hashes (wire ids). */
#define ALG_XXH3_64 6
#define ALG_XXH3_128 7
#define ALG_CITY_256 8

#define MAX_ELEMENT_LEN 500
#define MAX_DIGEST_DWORDS 8

/* Mirrors the 56-byte records produced by ohbf._pack_kernel_parts. */
typedef struct {
    uint32_t n;
    uint32_t start;
    uint64_t m_lo;
    uint64_t m_hi;
    uint32_t cpow[8]; /* 2^(32*j) mod n */
} Part;

#define PART_RECORD_SIZE 56

static inline unsigned __int128 part_reciprocal(const Part *p)
{
    return ((unsigned __int128)p->m_hi << 64) | p->m_lo;
}

/* High 64 bits of a 128x64 product; exact remainder when paired with the
 * reciprocal M = floor((2^128 - 1) / n) + 1, n < 2^63. */
static inline uint64_t mul128_hi64(unsigned __int128 lowbits, uint64_t d)
{
    unsigned __int128 bottom = (lowbits & 0xFFFFFFFFFFFFFFFFULL) * d;
    bottom >>= 64;
    unsigned __int128 top = (unsigned __int128)(uint64_t)(lowbits >> 64) * d;
    return (uint64_t)((bottom + top) >> 64);
}

static inline uint64_t fastmod_u64(uint64_t a, unsigned __int128 M, uint64_t d)
{
    return mul128_hi64(M * a, d);
}

/* Digest of `data`, exposed as big-endian 32-bit words (most significant
 * first), matching digest_to_uint() over the canonical digest bytes. */
static inline int digest_dwords(int algo, const uint8_t *data, Py_ssize_t len,
                                uint32_t dw[MAX_DIGEST_DWORDS])
{
    switch (algo) {
    case ALG_XXH3_64: {
        uint64_t v = (uint64_t)XXH3_64bits(data, (size_t)len);
        dw[0] = (uint32_t)(v >> 32);
        dw[1] = (uint32_t)v;
        return 2;
    }
    case ALG_XXH3_128: {
        XXH128_hash_t h = XXH3_128bits(data, (size_t)len);
        dw[0] = (uint32_t)(h.high64 >> 32);
        dw[1] = (uint32_t)h.high64;
        dw[2] = (uint32_t)(h.low64 >> 32);
        dw[3] = (uint32_t)h.low64;
        return 4;
    }
#ifdef __SSE4_2__
    case ALG_CITY_256: {
        uint64 r[4];
        CityHashCrc256((const char *)data, (size_t)len, r);
        /* Canonical bytes are the raw little-endian dump of r[0..3]; the
         * big-endian integer of those bytes therefore byte-swaps each
         * limb, r[0] most significant. */
        for (int i = 0; i < 4; i++) {
            uint64_t limb = __builtin_bswap64(r[i]);
            dw[2 * i] = (uint32_t)(limb >> 32);
            dw[2 * i + 1] = (uint32_t)limb;
        }
        return 8;
    }
#endif
    default:
        return -1;
    }
}

static inline uint64_t reduce_dwords(const uint32_t *dw, int ndw, const Part *p)
{
    /* x mod n with x = sum dw[j] * 2^(32*(ndw-1-j)).  Each term is below
     * 2^32 * 2^28, eight terms stay below 2^63, so one exact fastmod
     * finishes the reduction. */
    const uint32_t *c = p->cpow;
    uint64_t acc;
    switch (ndw) {
    case 2:
        acc = (uint64_t)dw[0] * c[1] + dw[1];
        break;
    case 4:
        acc = (uint64_t)dw[0] * c[3] + (uint64_t)dw[1] * c[2] +
              (uint64_t)dw[2] * c[1] + dw[3];
        break;
    case 8:
        acc = (uint64_t)dw[0] * c[7] + (uint64_t)dw[1] * c[6] +
              (uint64_t)dw[2] * c[5] + (uint64_t)dw[3] * c[4] +
              (uint64_t)dw[4] * c[3] + (uint64_t)dw[5] * c[2] +
              (uint64_t)dw[6] * c[1] + dw[7];
        break;
    default:
        acc = 0;
        for (int j = 0; j < ndw; j++)
            acc += (uint64_t)dw[j] * c[ndw - 1 - j];
        break;
    }
    return fastmod_u64(acc, part_reciprocal(p), p->n);
}

/* ---- message-hash splitting ------------------------------------------- */

static int split_bits(const uint8_t *data, Py_ssize_t nbytes, int k, int logt,
                      uint32_t *out)
{
    if (logt < 1 || logt > 20 || k < 1 || k > 4096)
        return -1;
    if ((Py_ssize_t)k * logt > nbytes * 8)
        return -1;
    uint64_t acc = 0;
    int navail = 0;
    Py_ssize_t pos = 0;
    uint32_t mask = (logt == 32) ? 0xFFFFFFFFu : ((1u << logt) - 1u);
    for (int j = 0; j < k; j++) {
        while (navail < logt) {
            acc = (acc << 8) | data[pos++];
            navail += 8;
        }
        out[j] = (uint32_t)(acc >> (navail - logt)) & mask;
        navail -= logt;
        acc &= (navail ? ((1ULL << navail) - 1) : 0);
    }
    return 0;
}

static int have_duplicate(const uint32_t *idx, int k)
{
    uint64_t seen[1024]; /* covers t <= 65536 */
    int dup = 0;
    for (int j = 0; j < k; j++) {
        uint32_t v = idx[j];
        if (v >= 65536) { /* fall back to quadratic scan */
            for (int a = 0; a < k && !dup; a++)
                for (int b = a + 1; b < k; b++)
                    if (idx[a] == idx[b]) { dup = 1; break; }
            return dup;
        }
        seen[v >> 6] = 0; /* lazy-clear only the words we will touch */
    }
    for (int j = 0; j < k; j++) {
        uint32_t v = idx[j];
        uint64_t bit = 1ULL << (v & 63);
        if (seen[v >> 6] & bit) { dup = 1; break; }
        seen[v >> 6] |= bit;
    }
    return dup;
}

/* Extracts (digest: bytes, k: int, logt: int) and splits; -1 on error. */
static int split_args(PyObject *const *args, Py_ssize_t nargs, uint32_t *idx,
                      int *k_out)
{
    if (nargs != 3 || !PyBytes_Check(args[0])) {
        PyErr_SetString(PyExc_TypeError, "expected (digest: bytes, k, logt)");
        return -1;
    }
    long k = PyLong_AsLong(args[1]);
    long logt = PyLong_AsLong(args[2]);
    if ((k == -1 || logt == -1) && PyErr_Occurred())
        return -1;
    if (k < 1 || k > 4096 ||
        split_bits((const uint8_t *)PyBytes_AS_STRING(args[0]),
                   PyBytes_GET_SIZE(args[0]), (int)k, (int)logt, idx) != 0) {
        PyErr_SetString(PyExc_ValueError, "digest too short for k*logt bits");
        return -1;
    }
    *k_out = (int)k;
    return 0;
}

static PyObject *indices_tuple(const uint32_t *idx, int k)
{
    PyObject *tup = PyTuple_New(k);
    if (!tup)
        return NULL;
    for (int j = 0; j < k; j++) {
        PyObject *v = PyLong_FromUnsignedLong(idx[j]);
        if (!v) { Py_DECREF(tup); return NULL; }
        PyTuple_SET_ITEM(tup, j, v);
    }
    return tup;
}

static PyObject *py_split_indices(PyObject *self, PyObject *const *args,
                                  Py_ssize_t nargs)
{
    uint32_t idx[4096];
    int k;
    if (split_args(args, nargs, idx, &k) != 0)
        return NULL;
    return indices_tuple(idx, k);
}

static PyObject *py_indices_distinct(PyObject *self, PyObject *const *args,
                                     Py_ssize_t nargs)
{
    uint32_t idx[4096];
    int k;
    if (split_args(args, nargs, idx, &k) != 0)
        return NULL;
    if (have_duplicate(idx, k))
        Py_RETURN_FALSE;
    Py_RETURN_TRUE;
}

/* Split and duplicate-check in one pass: the index tuple, or None when
 * any index repeats. */
static PyObject *py_split_indices_checked(PyObject *self, PyObject *const *args,
                                          Py_ssize_t nargs)
{
    uint32_t idx[4096];
    int k;
    if (split_args(args, nargs, idx, &k) != 0)
        return NULL;
    if (have_duplicate(idx, k))
        Py_RETURN_NONE;
    return indices_tuple(idx, k);
}

/* ---- batched filter operations ---------------------------------------- */

#define MODE_INSERT 0
#define MODE_CHECK_ALL 1
#define MODE_COUNT 2

static PyObject *py_ohbf_batch(PyObject *self, PyObject *const *args,
                               Py_ssize_t nargs)
{
    if (nargs != 6 || !PyByteArray_Check(args[0]) || !PyBytes_Check(args[1])) {
        PyErr_SetString(PyExc_TypeError,
                        "expected (bits: bytearray, parts: bytes, algo, items, "
                        "labels, mode)");
        return NULL;
    }
    PyObject *bits_obj = args[0];
    Py_ssize_t parts_len = PyBytes_GET_SIZE(args[1]);
    long algo = PyLong_AsLong(args[2]);
    PyObject *items = args[3];
    PyObject *labels = args[4];
    long mode = PyLong_AsLong(args[5]);
    if ((algo == -1 || mode == -1) && PyErr_Occurred())
        return NULL;

    const Part *part = (const Part *)PyBytes_AS_STRING(args[1]);
    Py_ssize_t np = parts_len / PART_RECORD_SIZE;
    uint8_t *bv = (uint8_t *)PyByteArray_AS_STRING(bits_obj);
    long result = 0;
    PyObject *fast_items = NULL;

    if (parts_len % PART_RECORD_SIZE != 0 || np < 1) {
        PyErr_SetString(PyExc_ValueError, "malformed partition table");
        goto fail;
    }
    /* labels: None = raw elements; int base = enumerate (base+i, 1-based);
     * tuple = explicit 0-based positions */
    if (labels != Py_None && !PyTuple_Check(labels) && !PyLong_Check(labels)) {
        PyErr_SetString(PyExc_TypeError, "labels must be a tuple, int, or None");
        goto fail;
    }

    {
        /* refuse to index outside the supplied bit vector */
        uint64_t need_bits = 0;
        for (Py_ssize_t j = 0; j < np; j++) {
            uint64_t end = (uint64_t)part[j].start + part[j].n;
            if (end > need_bits)
                need_bits = end;
        }
        if ((uint64_t)PyByteArray_GET_SIZE(bits_obj) * 8 < need_bits) {
            PyErr_SetString(PyExc_ValueError, "bit vector shorter than the plan");
            goto fail;
        }
    }

    fast_items = PySequence_Fast(items, "items must be a sequence");
    if (!fast_items)
        goto fail;

    {
        Py_ssize_t nitems = PySequence_Fast_GET_SIZE(fast_items);
        long base = -1;
        if (PyLong_Check(labels)) {
            base = PyLong_AsLong(labels);
            if (base < 0) {
                if (!PyErr_Occurred())
                    PyErr_SetString(PyExc_ValueError, "label base must be >= 0");
                goto fail;
            }
        } else if (labels != Py_None && PyTuple_GET_SIZE(labels) != nitems) {
            PyErr_SetString(PyExc_ValueError, "labels length mismatch");
            goto fail;
        }
        for (Py_ssize_t i = 0; i < nitems; i++) {
            PyObject *el = PySequence_Fast_GET_ITEM(fast_items, i);
            if (!PyBytes_Check(el)) {
                PyErr_SetString(PyExc_TypeError, "items must be bytes");
                goto fail;
            }
            Py_ssize_t elen = PyBytes_GET_SIZE(el);
            if (elen > MAX_ELEMENT_LEN) {
                PyErr_SetString(PyExc_ValueError, "element too long for kernel");
                goto fail;
            }
            uint8_t buf[MAX_ELEMENT_LEN + 4];
            memcpy(buf, PyBytes_AS_STRING(el), (size_t)elen);
            Py_ssize_t hlen = elen;
            if (labels != Py_None) {
                /* append the 1-based position as 4 big-endian bytes */
                unsigned long label;
                if (base >= 0) {
                    label = (unsigned long)(base + i);
                } else {
                    label = PyLong_AsUnsignedLong(PyTuple_GET_ITEM(labels, i));
                    if (label == (unsigned long)-1 && PyErr_Occurred())
                        goto fail;
                }
                label += 1;
                buf[elen] = (uint8_t)(label >> 24);
                buf[elen + 1] = (uint8_t)(label >> 16);
                buf[elen + 2] = (uint8_t)(label >> 8);
                buf[elen + 3] = (uint8_t)label;
                hlen = elen + 4;
            }

            uint32_t dw[MAX_DIGEST_DWORDS];
            int ndw = digest_dwords(algo, buf, hlen, dw);
            if (ndw < 0) {
                PyErr_SetString(PyExc_ValueError, "unsupported algorithm code");
                goto fail;
            }

            int present = 1;
            for (Py_ssize_t j = 0; j < np; j++) {
                const Part *p = &part[j];
                uint64_t off = p->start + reduce_dwords(dw, ndw, p);
                uint8_t maskbit = (uint8_t)(0x80u >> (off & 7));
                if (mode == MODE_INSERT) {
                    bv[off >> 3] |= maskbit;
                } else if (!(bv[off >> 3] & maskbit)) {
                    present = 0;
                    break;
                }
            }
            if (mode == MODE_CHECK_ALL && !present) {
                result = 0;
                goto done;
            }
            if (mode == MODE_COUNT && present)
                result += 1;
        }
        if (mode == MODE_CHECK_ALL)
            result = 1;
    }

done:
    Py_DECREF(fast_items);
    return PyLong_FromLong(result);

fail:
    Py_XDECREF(fast_items);
    return NULL;
}

/* Single digest reduced against every partition; used by the differential
 * tests to compare the reduction chain with Python int arithmetic. */
static PyObject *py_reduce_digest(PyObject *self, PyObject *args)
{
    Py_buffer dig, parts;
    if (!PyArg_ParseTuple(args, "y*y*", &dig, &parts))
        return NULL;
    if (parts.len % PART_RECORD_SIZE != 0 || dig.len % 4 != 0 ||
        dig.len / 4 > MAX_DIGEST_DWORDS) {
        PyBuffer_Release(&dig);
        PyBuffer_Release(&parts);
        PyErr_SetString(PyExc_ValueError, "bad digest or partition table");
        return NULL;
    }
    const uint8_t *d = (const uint8_t *)dig.buf;
    int ndw = (int)(dig.len / 4);
    uint32_t dw[MAX_DIGEST_DWORDS];
    for (int j = 0; j < ndw; j++)
        dw[j] = ((uint32_t)d[4 * j] << 24) | ((uint32_t)d[4 * j + 1] << 16) |
                ((uint32_t)d[4 * j + 2] << 8) | (uint32_t)d[4 * j + 3];
    Py_ssize_t np = parts.len / PART_RECORD_SIZE;
    const Part *part = (const Part *)parts.buf;
    PyObject *tup = PyTuple_New(np);
    if (!tup) {
        PyBuffer_Release(&dig);
        PyBuffer_Release(&parts);
        return NULL;
    }
    for (Py_ssize_t j = 0; j < np; j++) {
        PyObject *v = PyLong_FromUnsignedLongLong(reduce_dwords(dw, ndw, &part[j]));
        if (!v) {
            Py_DECREF(tup);
            PyBuffer_Release(&dig);
            PyBuffer_Release(&parts);
            return NULL;
        }
        PyTuple_SET_ITEM(tup, j, v);
    }
    PyBuffer_Release(&dig);
    PyBuffer_Release(&parts);
    return tup;
}

static PyMethodDef kernel_methods[] = {
    {"split_indices", (PyCFunction)(void (*)(void))py_split_indices,
     METH_FASTCALL,
     "split_indices(digest, k, logt) -> tuple of k leftmost logt-bit ints"},
    {"indices_distinct", (PyCFunction)(void (*)(void))py_indices_distinct,
     METH_FASTCALL,
     "indices_distinct(digest, k, logt) -> True if the k indices are distinct"},
    {"split_indices_checked",
     (PyCFunction)(void (*)(void))py_split_indices_checked, METH_FASTCALL,
     "split_indices_checked(digest, k, logt) -> tuple, or None on duplicates"},
    {"ohbf_batch", (PyCFunction)(void (*)(void))py_ohbf_batch, METH_FASTCALL,
     "ohbf_batch(bits, parts, algo, items, labels, mode) -> int\n"
     "mode 0 insert, 1 check-all, 2 count positives"},
    {"reduce_digest", py_reduce_digest, METH_VARARGS,
     "reduce_digest(digest_bytes, parts) -> per-partition offsets"},
    {NULL, NULL, 0, NULL},
};

static struct PyModuleDef kernel_module = {
    PyModuleDef_HEAD_INIT, "tvpdhors._kernel",
    "Batched filter and index-splitting kernels.", -1, kernel_methods,
};

PyMODINIT_FUNC PyInit__kernel(void)
{
    PyObject *m = PyModule_Create(&kernel_module);
    if (!m)
        return NULL;
#ifdef __SSE4_2__
    PyModule_AddIntConstant(m, "HAS_CITY256", 1);
#else
    PyModule_AddIntConstant(m, "HAS_CITY256", 0);
#endif
    PyModule_AddIntConstant(m, "MAX_ELEMENT_LEN", MAX_ELEMENT_LEN);
    return m;
}
