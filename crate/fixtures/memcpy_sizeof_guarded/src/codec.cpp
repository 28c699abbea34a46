void Java_media_Codec_decode(JNIEnv *env, jobject self, jbyteArray frame, jint len) {
    char header[16];
    jbyte *bytes = env->GetByteArrayElements(frame, 0);
    if (len <= sizeof(header)) {
        memcpy(header, bytes, len);
    }
}
