#include <stdio.h>
#include "metric_embed.h"

int main(void) {
    const double dist[9] = {0, 2, 3, 2, 0, 2, 3, 2, 0};
    MeSpace *space = NULL;
    MeProperEmbedding *emb = NULL;
    MeReport *report = NULL;
    char *json = NULL;

    if (me_space_new(dist, 3, &space) != ME_STATUS_OK) {
        fprintf(stderr, "%s\n", me_last_error());
        return 2;
    }
    if (me_proper_embed(space, 0, true, 42, &emb) != ME_STATUS_OK ||
        me_proper_verify(emb, &report) != ME_STATUS_OK ||
        me_report_to_json(report, &json) != ME_STATUS_OK) {
        fprintf(stderr, "%s\n", me_last_error());
        return 2;
    }
    printf("passed=%d pairs=%zu\n", me_report_passed(report), me_report_pair_count(report));
    int ok = me_report_passed(report);
    me_string_free(json);
    me_report_free(report);
    me_proper_free(emb);
    me_space_free(space);
    return ok ? 0 : 1;
}
