#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "thz_isac.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        ThzStatus s_ = (call);                                             \
        if (s_ != THZ_STATUS_OK) {                                         \
            fprintf(stderr, "%s failed (%d): %s\n", #call, (int)s_,        \
                    thz_last_error() ? thz_last_error() : "?");            \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    ThzWaveformParams p;
    ThzWaveform *wf = NULL;
    ThzFrame *frame = NULL;
    ThzSensingResult est;
    double papr = 0.0;

    CHECK(thz_waveform_default_params(THZ_WAVEFORM_KIND_DFTS_OTFS, 64, 16, &p));
    CHECK(thz_waveform_new(&p, &wf));
    CHECK(thz_modulate_random(wf, 1, &frame));

    size_t len = thz_frame_len(frame);
    ThzComplex *buf = malloc(len * sizeof *buf);
    CHECK(thz_frame_samples(frame, buf, len));
    CHECK(thz_papr_db(buf, len, 4, &papr));
    CHECK(thz_sensing_trial(wf, 10.0, 5.5556, NAN, 2, &est));

    printf("thz-isac %s: %zu samples, PAPR %.2f dB, range %.4f m\n", thz_version(), len, papr,
           est.range_m);

    p.qam_order = 8;
    ThzWaveform *bad = NULL;
    if (thz_waveform_new(&p, &bad) != THZ_STATUS_INVALID_ARGUMENT || bad != NULL) {
        fprintf(stderr, "invalid QAM order accepted\n");
        return 1;
    }

    free(buf);
    thz_frame_free(frame);
    thz_waveform_free(wf);
    return fabs(est.range_m - 10.0) < 1e-3 ? 0 : 1;
}
